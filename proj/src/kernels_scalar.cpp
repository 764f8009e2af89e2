#include "graybatt/kernels.hpp"

#include <cstring>

namespace graybatt::kern {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_shift_scalar(const double* x, double mu, double sigma, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - mu) / sigma;
}

void mul_scalar(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void gemv_n_scalar(const double* a, std::size_t n, std::size_t m, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * m;
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void gemv_t_scalar(const double* a, std::size_t n, std::size_t m, const double* x, double* y) {
    std::memset(y, 0, m * sizeof(double));
    for (std::size_t k = 0; k < n; ++k) {
        const double* row = a + k * m;
        const double xk = x[k];
        for (std::size_t j = 0; j < m; ++j) y[j] += row[j] * xk;
    }
}

void syrk_scalar(const double* a, std::size_t n, std::size_t m, double* g) {
    std::memset(g, 0, m * m * sizeof(double));
    for (std::size_t k = 0; k < n; ++k) {
        const double* row = a + k * m;
        for (std::size_t i = 0; i < m; ++i) {
            const double ri = row[i];
            double* gi = g + i * m;
            for (std::size_t j = i; j < m; ++j) gi[j] += ri * row[j];
        }
    }
    // mirror upper triangle
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j) g[i * m + j] = g[j * m + i];
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend b{
        "scalar",
        dot_scalar,
        axpy_scalar,
        scale_shift_scalar,
        mul_scalar,
        gemv_n_scalar,
        gemv_t_scalar,
        syrk_scalar,
    };
    return b;
}

}  // namespace graybatt::kern
