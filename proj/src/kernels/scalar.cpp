#include "nhse/kernels.hpp"

namespace nhse::kernels {

namespace {

void caxpy(std::size_t n, Complex a, const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void det2(std::size_t n, Complex e, const Complex* p, const Complex* q, const Complex* r,
          const Complex* s, const Complex* dp, const Complex* dq, const Complex* dr,
          const Complex* ds, Complex* det, Complex* ddet) {
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = e - p[i];
    const Complex d = e - s[i];
    det[i] = a * d - q[i] * r[i];
    ddet[i] = -(dp[i] * d) - a * ds[i] - dq[i] * r[i] - q[i] * dr[i];
  }
}

void im_ratio(std::size_t n, const Complex* num, const Complex* den, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = den[i].real() * den[i].real() + den[i].imag() * den[i].imag();
    out[i] = (num[i].imag() * den[i].real() - num[i].real() * den[i].imag()) / norm;
  }
}

void abs2(std::size_t n, const Complex* z, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
}

void site_density(std::size_t sites, int orbitals, const Complex* psi, double* out) {
  for (std::size_t i = 0; i < sites; ++i) {
    double acc = 0.0;
    for (int o = 0; o < orbitals; ++o) {
      const Complex& z = psi[i * orbitals + o];
      acc += z.real() * z.real() + z.imag() * z.imag();
    }
    out[i] = acc;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", caxpy, det2, im_ratio, abs2, site_density};
  return table;
}

}  // namespace nhse::kernels
