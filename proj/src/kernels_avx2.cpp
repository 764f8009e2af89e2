#include "graybatt/kernels.hpp"

#include <cmath>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#define GRAYBATT_X86 1
#include <immintrin.h>
#else
#define GRAYBATT_X86 0
#endif

namespace graybatt::kern {

#if GRAYBATT_X86

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc = std::fma(x[i], y[i], acc);
    return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scale_shift_avx2(const double* x, double mu, double sigma, double* out, std::size_t n) {
    const __m256d vmu = _mm256_set1_pd(mu);
    const __m256d vs = _mm256_set1_pd(sigma);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_sub_pd(_mm256_loadu_pd(x + i), vmu);
        _mm256_storeu_pd(out + i, _mm256_div_pd(v, vs));
    }
    for (; i < n; ++i) out[i] = (x[i] - mu) / sigma;
}

void mul_avx2(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

void gemv_n_avx2(const double* a, std::size_t n, std::size_t m, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = dot_avx2(a + i * m, x, m);
    }
}

// Per output entry j, accumulation runs over rows k in ascending order with
// one fma per row; a column subset therefore reproduces the full-matrix
// entries exactly.
void gemv_t_avx2(const double* a, std::size_t n, std::size_t m, const double* x, double* y) {
    std::memset(y, 0, m * sizeof(double));
    for (std::size_t k = 0; k < n; ++k) {
        const double* row = a + k * m;
        const __m256d xk = _mm256_set1_pd(x[k]);
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            __m256d vy = _mm256_loadu_pd(y + j);
            vy = _mm256_fmadd_pd(xk, _mm256_loadu_pd(row + j), vy);
            _mm256_storeu_pd(y + j, vy);
        }
        for (; j < m; ++j) y[j] = std::fma(x[k], row[j], y[j]);
    }
}

void syrk_avx2(const double* a, std::size_t n, std::size_t m, double* g) {
    std::memset(g, 0, m * m * sizeof(double));
    for (std::size_t k = 0; k < n; ++k) {
        const double* row = a + k * m;
        for (std::size_t i = 0; i < m; ++i) {
            const __m256d ri = _mm256_set1_pd(row[i]);
            double* gi = g + i * m;
            std::size_t j = i;
            for (; j + 4 <= m; j += 4) {
                __m256d vg = _mm256_loadu_pd(gi + j);
                vg = _mm256_fmadd_pd(ri, _mm256_loadu_pd(row + j), vg);
                _mm256_storeu_pd(gi + j, vg);
            }
            for (; j < m; ++j) gi[j] = std::fma(row[i], row[j], gi[j]);
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j) g[i * m + j] = g[j * m + i];
}

}  // namespace

const Backend& avx2_backend() {
    static const Backend b{
        "avx2",
        dot_avx2,
        axpy_avx2,
        scale_shift_avx2,
        mul_avx2,
        gemv_n_avx2,
        gemv_t_avx2,
        syrk_avx2,
    };
    return b;
}

#else  // !GRAYBATT_X86

const Backend& avx2_backend() { return scalar_backend(); }

#endif

}  // namespace graybatt::kern
