#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "nhse/error.hpp"
#include "nhse/lattice_model.hpp"

namespace test_support {

using nhse::CMatrix;
using nhse::Complex;

inline CMatrix random_matrix(std::mt19937_64& rng, int s, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  CMatrix m(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

// Nearest-neighbour model with random matrices on every j in {-1,0,1}^d.
inline nhse::TightBindingModel random_model(std::mt19937_64& rng, int d, int s,
                                            double scale = 1.0) {
  std::vector<nhse::HoppingTerm> terms;
  const int count = static_cast<int>(std::pow(3, d));
  for (int c = 0; c < count; ++c) {
    nhse::HopVector j(d);
    int rest = c;
    for (int m = 0; m < d; ++m) {
      j[m] = rest % 3 - 1;
      rest /= 3;
    }
    terms.push_back({j, random_matrix(rng, s, scale)});
  }
  return nhse::TightBindingModel("random", d, s, terms);
}

inline CMatrix random_unitary(std::mt19937_64& rng, int s) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, s));
  return qr.householderQ() * CMatrix::Identity(s, s);
}

inline nhse::TightBindingModel hatano_nelson(double tp, double tm) {
  return nhse::TightBindingModel("hn", 1, 1,
                                 {{{1}, CMatrix::Constant(1, 1, tp)},
                                  {{-1}, CMatrix::Constant(1, 1, tm)}});
}

template <class F>
nhse::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const nhse::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an nhse::Error");
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace test_support
