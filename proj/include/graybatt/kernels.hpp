#pragma once

#include <cstddef>
#include <string>

// Dense double-precision kernels behind the regression pipeline.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active backend is chosen once at runtime from CPU
// capabilities; GRAYBATT_KERNELS=scalar|avx2 overrides the choice (an avx2
// request on unsupported hardware falls back to scalar).
//
// Matrices are row-major. syrk/gemv_t accumulate over rows in ascending
// order per output entry, so the Gram matrix of a column subset equals the
// corresponding submatrix of the full Gram bit-for-bit within one backend.

namespace graybatt::kern {

struct Backend {
    const char* name;

    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // out[i] = (x[i] - mu) / sigma; division keeps the result bit-identical
    // to the scalar z-score used at inference time
    void (*scale_shift)(const double* x, double mu, double sigma, double* out, std::size_t n);
    // out[i] = x[i] * y[i]
    void (*mul)(const double* x, const double* y, double* out, std::size_t n);
    // y = A x,   A is n x m
    void (*gemv_n)(const double* a, std::size_t n, std::size_t m, const double* x, double* y);
    // y = A^T x, A is n x m
    void (*gemv_t)(const double* a, std::size_t n, std::size_t m, const double* x, double* y);
    // G = A^T A, A is n x m, G is m x m (both triangles filled)
    void (*syrk)(const double* a, std::size_t n, std::size_t m, double* g);
};

const Backend& scalar_backend();
const Backend& avx2_backend();   // valid only where avx2_available()

bool avx2_available();

// Active backend (resolved once, thread-safe).
const Backend& active();
const std::string& active_name();

// Convenience forwarders through the active backend.
inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }
inline void scale_shift(const double* x, double mu, double sigma, double* out, std::size_t n) {
    active().scale_shift(x, mu, sigma, out, n);
}
inline void mul(const double* x, const double* y, double* out, std::size_t n) { active().mul(x, y, out, n); }
inline void gemv_n(const double* a, std::size_t n, std::size_t m, const double* x, double* y) {
    active().gemv_n(a, n, m, x, y);
}
inline void gemv_t(const double* a, std::size_t n, std::size_t m, const double* x, double* y) {
    active().gemv_t(a, n, m, x, y);
}
inline void syrk(const double* a, std::size_t n, std::size_t m, double* g) { active().syrk(a, n, m, g); }

}  // namespace graybatt::kern
