#pragma once

#include <complex>
#include <cstddef>

namespace nhse::kernels {

using Complex = std::complex<double>;

// Batched inner loops shared by the winding, Ronkin and density code.
// Every kernel has a portable scalar version and an AVX2/FMA version; the
// active table is picked once at startup from the CPU feature flags.
struct KernelTable {
  const char* name;
  // y[i] += a * x[i]
  void (*caxpy)(std::size_t n, Complex a, const Complex* x, Complex* y);
  // det[i] = (e - p[i]) (e - s[i]) - q[i] r[i]
  // ddet[i] = -dp[i] (e - s[i]) - (e - p[i]) ds[i] - dq[i] r[i] - q[i] dr[i]
  void (*det2)(std::size_t n, Complex e, const Complex* p, const Complex* q, const Complex* r,
               const Complex* s, const Complex* dp, const Complex* dq, const Complex* dr,
               const Complex* ds, Complex* det, Complex* ddet);
  // out[i] = Im(num[i] / den[i])
  void (*im_ratio)(std::size_t n, const Complex* num, const Complex* den, double* out);
  // out[i] = |z[i]|^2
  void (*abs2)(std::size_t n, const Complex* z, double* out);
  // out[i] = sum_o |psi[i * orbitals + o]|^2
  void (*site_density)(std::size_t sites, int orbitals, const Complex* psi, double* out);
};

const KernelTable& scalar_table();
// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_table();

// True when avx2_table() exists and the CPU can run it.
bool avx2_usable();

// Table in use. NHSE_SIMD=scalar forces the portable path.
const KernelTable& active();

}  // namespace nhse::kernels
