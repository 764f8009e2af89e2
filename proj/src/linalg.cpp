#include "graybatt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "graybatt/kernels.hpp"

namespace graybatt::linalg {

bool cholesky_solve(const Matrix& g, double damping, const std::vector<double>& b,
                    std::vector<double>& x) {
    const std::size_t m = g.rows;
    Matrix l(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = g.at(i, j) + (i == j ? damping : 0.0);
            for (std::size_t k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                // a pivot this far below the diagonal scale is cancellation
                // noise from a (near-)singular matrix, not a usable value
                const double scale = std::abs(g.at(i, i)) + damping;
                if (!(s > 1e-13 * scale) || !std::isfinite(s)) return false;
                l.at(i, i) = std::sqrt(s);
            } else {
                l.at(i, j) = s / l.at(j, j);
            }
        }
    }
    // forward then back substitution
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l.at(i, k) * y[k];
        y[i] = s / l.at(i, i);
    }
    x.assign(m, 0.0);
    for (std::size_t ii = m; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < m; ++k) s -= l.at(k, ii) * x[k];
        x[ii] = s / l.at(ii, ii);
    }
    return true;
}

bool gauss_solve(Matrix a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = a.rows;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a.at(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a.at(r, col)) > best) {
                best = std::abs(a.at(r, col));
                piv = r;
            }
        }
        if (best < 1e-300) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a.at(piv, c), a.at(col, c));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a.at(r, col) / a.at(col, col);
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a.at(r, c) -= f * a.at(col, c);
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t c = ii + 1; c < n; ++c) s -= a.at(ii, c) * x[c];
        x[ii] = s / a.at(ii, ii);
    }
    return true;
}

void sym_eig(const Matrix& g, std::vector<double>& eigvals, Matrix& eigvecs) {
    const std::size_t m = g.rows;
    Matrix a = g;
    eigvecs = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) eigvecs.at(i, i) = 1.0;

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) off += a.at(p, q) * a.at(p, q);
        if (off < 1e-300) break;

        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                const double apq = a.at(p, q);
                if (apq == 0.0) continue;
                const double app = a.at(p, p);
                const double aqq = a.at(q, q);
                if (std::abs(apq) < 1e-30 * (std::abs(app) + std::abs(aqq) + 1e-300)) continue;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < m; ++k) {
                    const double akp = a.at(k, p);
                    const double akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double apk = a.at(p, k);
                    const double aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double vkp = eigvecs.at(k, p);
                    const double vkq = eigvecs.at(k, q);
                    eigvecs.at(k, p) = c * vkp - s * vkq;
                    eigvecs.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    eigvals.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) eigvals[i] = a.at(i, i);
}

std::vector<double> pinv_solve_sym(const Matrix& g, const std::vector<double>& b, double rel_tol) {
    const std::size_t m = g.rows;
    std::vector<double> eigvals;
    Matrix v;
    sym_eig(g, eigvals, v);
    double max_eig = 0.0;
    for (double e : eigvals) max_eig = std::max(max_eig, std::abs(e));
    const double cutoff = rel_tol * std::max(max_eig, 1e-300);

    // x = V diag(1/eig where |eig| > cutoff) V^T b
    std::vector<double> vtb(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += v.at(i, j) * b[i];
        vtb[j] = (std::abs(eigvals[j]) > cutoff) ? s / eigvals[j] : 0.0;
    }
    std::vector<double> x(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += v.at(i, j) * vtb[j];
        x[i] = s;
    }
    return x;
}

ThinSvd svd_thin(const Matrix& a) {
    const std::size_t n = a.rows;
    const std::size_t m = a.cols;
    ThinSvd out;
    out.u = a;
    out.v = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) out.v.at(i, i) = 1.0;

    // One-sided Jacobi: rotate column pairs of U until mutually orthogonal,
    // accumulating the same rotations into V.
    std::vector<double> colp(n), colq(n);
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool any = false;
        for (std::size_t p = 0; p + 1 < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double up = out.u.at(k, p);
                    const double uq = out.u.at(k, q);
                    app += up * up;
                    aqq += uq * uq;
                    apq += up * uq;
                }
                if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
                any = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double up = out.u.at(k, p);
                    const double uq = out.u.at(k, q);
                    out.u.at(k, p) = c * up - s * uq;
                    out.u.at(k, q) = s * up + c * uq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double vp = out.v.at(k, p);
                    const double vq = out.v.at(k, q);
                    out.v.at(k, p) = c * vp - s * vq;
                    out.v.at(k, q) = s * vp + c * vq;
                }
            }
        }
        if (!any) break;
    }

    // Column norms are the singular values; normalize U columns.
    out.sigma.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += out.u.at(k, j) * out.u.at(k, j);
        out.sigma[j] = std::sqrt(s);
    }
    // Sort descending, permuting U and V columns consistently.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return out.sigma[i] > out.sigma[j]; });
    Matrix u2(n, m), v2(m, m);
    std::vector<double> s2(m);
    for (std::size_t jj = 0; jj < m; ++jj) {
        const std::size_t src = order[jj];
        s2[jj] = out.sigma[src];
        const double inv = (s2[jj] > 0.0) ? 1.0 / s2[jj] : 0.0;
        for (std::size_t k = 0; k < n; ++k) u2.at(k, jj) = out.u.at(k, src) * inv;
        for (std::size_t k = 0; k < m; ++k) v2.at(k, jj) = out.v.at(k, src);
    }
    out.u = std::move(u2);
    out.v = std::move(v2);
    out.sigma = std::move(s2);
    return out;
}

}  // namespace graybatt::linalg
