#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "nhse/kernels.hpp"

using nhse::kernels::Complex;
using nhse::kernels::KernelTable;

namespace {

std::vector<Complex> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> v(n);
  for (Complex& z : v) z = Complex(g(rng), g(rng));
  return v;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }
double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Lengths cover empty input, tails shorter than one vector and odd sizes.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 17, 64, 129};

}  // namespace

TEST_CASE("scalar kernels match direct formulas") {
  const KernelTable& k = nhse::kernels::scalar_table();
  std::mt19937_64 rng(1);
  const std::size_t n = 9;
  auto x = random_vector(rng, n), y = random_vector(rng, n);
  auto y0 = y;
  const Complex a(0.3, -1.1);
  k.caxpy(n, a, x.data(), y.data());
  for (std::size_t i = 0; i < n; ++i) CHECK(rel(y[i], y0[i] + a * x[i]) < 1e-15);

  std::vector<double> out(n);
  k.im_ratio(n, x.data(), y0.data(), out.data());
  for (std::size_t i = 0; i < n; ++i) CHECK(rel(out[i], (x[i] / y0[i]).imag()) < 1e-14);
  k.abs2(n, x.data(), out.data());
  for (std::size_t i = 0; i < n; ++i) CHECK(rel(out[i], std::norm(x[i])) < 1e-15);

  auto p = random_vector(rng, n), q = random_vector(rng, n), r = random_vector(rng, n),
       s = random_vector(rng, n), dp = random_vector(rng, n), dq = random_vector(rng, n),
       dr = random_vector(rng, n), ds = random_vector(rng, n);
  std::vector<Complex> det(n), ddet(n);
  const Complex e(0.5, 0.25);
  k.det2(n, e, p.data(), q.data(), r.data(), s.data(), dp.data(), dq.data(), dr.data(), ds.data(),
         det.data(), ddet.data());
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(rel(det[i], (e - p[i]) * (e - s[i]) - q[i] * r[i]) < 1e-14);
    CHECK(rel(ddet[i], -dp[i] * (e - s[i]) - (e - p[i]) * ds[i] - dq[i] * r[i] - q[i] * dr[i]) <
          1e-14);
  }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelTable* v = nhse::kernels::avx2_table();
  if (v == nullptr || !nhse::kernels::avx2_usable()) {
    MESSAGE("AVX2 kernels unavailable; skipping");
    return;
  }
  const KernelTable& ref = nhse::kernels::scalar_table();
  std::mt19937_64 rng(2);
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    auto x = random_vector(rng, n), y = random_vector(rng, n);
    const Complex a(-0.7, 0.9);
    auto ya = y, yb = y;
    ref.caxpy(n, a, x.data(), ya.data());
    v->caxpy(n, a, x.data(), yb.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(yb[i], ya[i]) < 1e-14);

    std::vector<double> oa(n), ob(n);
    ref.im_ratio(n, x.data(), y.data(), oa.data());
    v->im_ratio(n, x.data(), y.data(), ob.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(ob[i], oa[i]) < 1e-13);
    ref.abs2(n, x.data(), oa.data());
    v->abs2(n, x.data(), ob.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(ob[i], oa[i]) < 1e-14);

    auto p = random_vector(rng, n), q = random_vector(rng, n), r = random_vector(rng, n),
         s = random_vector(rng, n), dp = random_vector(rng, n), dq = random_vector(rng, n),
         dr = random_vector(rng, n), ds = random_vector(rng, n);
    std::vector<Complex> da(n), dda(n), db(n), ddb(n);
    const Complex e(1.5, -0.5);
    ref.det2(n, e, p.data(), q.data(), r.data(), s.data(), dp.data(), dq.data(), dr.data(),
             ds.data(), da.data(), dda.data());
    v->det2(n, e, p.data(), q.data(), r.data(), s.data(), dp.data(), dq.data(), dr.data(),
            ds.data(), db.data(), ddb.data());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(rel(db[i], da[i]) < 1e-13);
      CHECK(rel(ddb[i], dda[i]) < 1e-13);
    }
  }
  for (int orbitals = 1; orbitals <= 4; ++orbitals) {
    for (std::size_t sites : {1, 3, 8, 41}) {
      auto psi = random_vector(rng, sites * orbitals);
      std::vector<double> oa(sites), ob(sites);
      ref.site_density(sites, orbitals, psi.data(), oa.data());
      v->site_density(sites, orbitals, psi.data(), ob.data());
      for (std::size_t i = 0; i < sites; ++i) CHECK(rel(ob[i], oa[i]) < 1e-14);
    }
  }
}

TEST_CASE("site density sums orbital weights") {
  const KernelTable& k = nhse::kernels::active();
  std::vector<Complex> psi{{1, 0}, {0, 1}, {3, 4}, {0, 0}};
  std::vector<double> out(2);
  k.site_density(2, 2, psi.data(), out.data());
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(25.0));
}

TEST_CASE("active table honours the scalar override") {
  const char* forced = std::getenv("NHSE_SIMD");
  const std::string name = nhse::kernels::active().name;
  if (forced != nullptr && std::string(forced) == "scalar") {
    CHECK(name == nhse::kernels::scalar_table().name);
  } else if (nhse::kernels::avx2_usable()) {
    CHECK(name == nhse::kernels::avx2_table()->name);
  }
}
