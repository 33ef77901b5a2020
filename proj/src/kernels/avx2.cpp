#include <immintrin.h>

#include "nhse/kernels.hpp"

namespace nhse::kernels {

namespace {

// Two interleaved complex doubles per register: [re0, im0, re1, im1].

inline __m256d load(const Complex* z) { return _mm256_loadu_pd(reinterpret_cast<const double*>(z)); }
inline void store(Complex* z, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(z), v); }

inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d re = _mm256_movedup_pd(a);
  const __m256d im = _mm256_permute_pd(a, 0xF);
  const __m256d swapped = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(re, b, _mm256_mul_pd(im, swapped));
}

inline __m256d broadcast(Complex a) { return _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag()); }

void caxpy(std::size_t n, Complex a, const Complex* x, Complex* y) {
  const __m256d va = broadcast(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store(y + i, _mm256_add_pd(load(y + i), cmul(va, load(x + i))));
  for (; i < n; ++i) y[i] += a * x[i];
}

void det2(std::size_t n, Complex e, const Complex* p, const Complex* q, const Complex* r,
          const Complex* s, const Complex* dp, const Complex* dq, const Complex* dr,
          const Complex* ds, Complex* det, Complex* ddet) {
  const __m256d ve = broadcast(e);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_sub_pd(ve, load(p + i));
    const __m256d d = _mm256_sub_pd(ve, load(s + i));
    const __m256d vq = load(q + i);
    const __m256d vr = load(r + i);
    store(det + i, _mm256_sub_pd(cmul(a, d), cmul(vq, vr)));
    __m256d acc = _mm256_add_pd(cmul(load(dp + i), d), cmul(a, load(ds + i)));
    acc = _mm256_add_pd(acc, cmul(load(dq + i), vr));
    acc = _mm256_add_pd(acc, cmul(vq, load(dr + i)));
    store(ddet + i, _mm256_sub_pd(_mm256_setzero_pd(), acc));
  }
  for (; i < n; ++i) {
    const Complex a = e - p[i];
    const Complex d = e - s[i];
    det[i] = a * d - q[i] * r[i];
    ddet[i] = -(dp[i] * d) - a * ds[i] - dq[i] * r[i] - q[i] * dr[i];
  }
}

void im_ratio(std::size_t n, const Complex* num, const Complex* den, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // Deinterleave four complex numbers of each operand.
    const __m256d n01 = load(num + i);
    const __m256d n23 = load(num + i + 2);
    const __m256d d01 = load(den + i);
    const __m256d d23 = load(den + i + 2);
    const __m256d nre = _mm256_permute4x64_pd(_mm256_unpacklo_pd(n01, n23), 0xD8);
    const __m256d nim = _mm256_permute4x64_pd(_mm256_unpackhi_pd(n01, n23), 0xD8);
    const __m256d dre = _mm256_permute4x64_pd(_mm256_unpacklo_pd(d01, d23), 0xD8);
    const __m256d dim = _mm256_permute4x64_pd(_mm256_unpackhi_pd(d01, d23), 0xD8);
    const __m256d norm = _mm256_fmadd_pd(dre, dre, _mm256_mul_pd(dim, dim));
    const __m256d cross = _mm256_fmsub_pd(nim, dre, _mm256_mul_pd(nre, dim));
    _mm256_storeu_pd(out + i, _mm256_div_pd(cross, norm));
  }
  for (; i < n; ++i) {
    const double norm = den[i].real() * den[i].real() + den[i].imag() * den[i].imag();
    out[i] = (num[i].imag() * den[i].real() - num[i].real() * den[i].imag()) / norm;
  }
}

void abs2(std::size_t n, const Complex* z, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = load(z + i);
    const __m256d b = load(z + i + 2);
    const __m256d sa = _mm256_mul_pd(a, a);
    const __m256d sb = _mm256_mul_pd(b, b);
    // hadd gives [a0, b0, a1, b1]; reorder to [a0, a1, b0, b1].
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(_mm256_hadd_pd(sa, sb), 0xD8));
  }
  for (; i < n; ++i) out[i] = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
}

void site_density(std::size_t sites, int orbitals, const Complex* psi, double* out) {
  if (orbitals == 2) {
    std::size_t i = 0;
    for (; i + 2 <= sites; i += 2) {
      const __m256d a = load(psi + 2 * i);
      const __m256d b = load(psi + 2 * i + 2);
      const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
      // h = [|a0|^2, |b0|^2, |a1|^2, |b1|^2] per orbital; fold orbitals.
      const __m128d lo = _mm256_castpd256_pd128(h);
      const __m128d hi = _mm256_extractf128_pd(h, 1);
      _mm_storeu_pd(out + i, _mm_add_pd(lo, hi));
    }
    for (; i < sites; ++i) {
      const Complex& x = psi[2 * i];
      const Complex& y = psi[2 * i + 1];
      out[i] = (x.real() * x.real() + x.imag() * x.imag()) + (y.real() * y.real() + y.imag() * y.imag());
    }
    return;
  }
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

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2", caxpy, det2, im_ratio, abs2, site_density};
  return &table;
}

}  // namespace nhse::kernels
