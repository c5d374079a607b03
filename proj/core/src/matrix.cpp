#include "popdyn/matrix.hpp"
#include <cmath>
#include <stdexcept>
#include <algorithm>
#include <numeric>

namespace popdyn {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix mat_mul(const Matrix& x, const Matrix& y) {
    if (x.n != y.n) throw std::invalid_argument("mat_mul: size mismatch");
    Matrix z(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t k = 0; k < x.n; ++k) {
            double xv = x(i, k);
            if (xv == 0.0) continue;
            for (std::size_t j = 0; j < x.n; ++j)
                z(i, j) += xv * y(k, j);
        }
    return z;
}

std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& v) {
    if (m.n != v.size()) throw std::invalid_argument("mat_vec: size mismatch");
    std::vector<double> out(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) s += m(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

std::vector<double> vec_mat(const std::vector<double>& v, const Matrix& m) {
    if (m.n != v.size()) throw std::invalid_argument("vec_mat: size mismatch");
    std::vector<double> out(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        double vi = v[i];
        if (vi == 0.0) continue;
        for (std::size_t j = 0; j < m.n; ++j) out[j] += vi * m(i, j);
    }
    return out;
}

std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    const std::size_t n = a.n;
    if (b.size() != n) throw std::invalid_argument("solve_linear: size mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
        if (std::fabs(a(pivot, col)) < 1e-300)
            throw std::runtime_error("solve_linear: singular matrix");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

Matrix matrix_exp_uniformization(const Matrix& q_mat, double t, double tail_tol) {
    const std::size_t n = q_mat.n;
    if (n == 0) throw std::invalid_argument("matrix_exp: empty matrix");
    if (t < 0.0) throw std::invalid_argument("matrix_exp: negative time");
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q = std::max(q, -q_mat(i, i));
    if (q == 0.0 || t == 0.0) return Matrix::identity(n);

    Matrix p(n); // P = I + Q/q, substochastic errors guarded below
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            p(i, j) = (i == j ? 1.0 : 0.0) + q_mat(i, j) / q;

    const double mu = q * t;
    // Poisson(mu) weights by recurrence, accumulated until tail < tail_tol.
    // Start from the mode to avoid underflow for large mu: use log weights.
    const std::size_t cap = static_cast<std::size_t>(mu + 12.0 * std::sqrt(mu + 1.0) + 64.0);
    Matrix acc(n);
    Matrix term = Matrix::identity(n); // P^k as we go
    double logw = -mu;                 // log Pois(mu, 0)
    double cum = 0.0;
    for (std::size_t k = 0;; ++k) {
        double w = std::exp(logw);
        if (w > 0.0) {
            for (std::size_t idx = 0; idx < acc.a.size(); ++idx)
                acc.a[idx] += w * term.a[idx];
            cum += w;
        }
        if (1.0 - cum < tail_tol && k >= static_cast<std::size_t>(mu)) break;
        if (k > cap) throw std::runtime_error("matrix_exp: uniformization series cap exceeded");
        term = mat_mul(term, p);
        logw += std::log(mu) - std::log1p(static_cast<double>(k));
    }
    // distribute the truncated tail onto the diagonal direction of the last
    // power is overkill; a row renormalization keeps rows stochastic to ~tail_tol
    return acc;
}

SymmetricEigen jacobi_eigen(Matrix m, int max_sweeps) {
    const std::size_t n = m.n;
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = m(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = m(k, p), akq = m(k, q);
                    m(k, p) = c * akp - s * akq;
                    m(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = m(p, k), aqk = m(q, k);
                    m(p, k) = c * apk - s * aqk;
                    m(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = m(i, i);
    // sort ascending, permuting eigenvector columns alongside
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return out.values[a] < out.values[b]; });
    SymmetricEigen sorted;
    sorted.values.resize(n);
    sorted.vectors = Matrix(n);
    for (std::size_t c = 0; c < n; ++c) {
        sorted.values[c] = out.values[idx[c]];
        for (std::size_t r = 0; r < n; ++r) sorted.vectors(r, c) = v(r, idx[c]);
    }
    return sorted;
}

} // namespace popdyn
