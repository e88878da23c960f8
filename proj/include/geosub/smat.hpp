#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "geosub/errors.hpp"

// Dense helpers for small (n <= 8) symmetric matrices, row-major storage.

namespace geosub::smat {

inline double& at(std::vector<double>& a, int n, int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
inline double at(const std::vector<double>& a, int n, int i, int j) { return a[static_cast<size_t>(i) * n + j]; }

inline std::vector<double> identity(int n) {
    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) at(a, n, i, i) = 1.0;
    return a;
}

inline std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b, int n) {
    std::vector<double> c(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = at(a, n, i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) at(c, n, i, j) += aik * at(b, n, k, j);
        }
    return c;
}

inline std::vector<double> transpose(const std::vector<double>& a, int n) {
    std::vector<double> t(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) at(t, n, i, j) = at(a, n, j, i);
    return t;
}

inline void symmetrize(std::vector<double>& a, int n) {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double m = 0.5 * (at(a, n, i, j) + at(a, n, j, i));
            at(a, n, i, j) = m;
            at(a, n, j, i) = m;
        }
}

inline double max_asymmetry(const std::vector<double>& a, int n) {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m = std::max(m, std::abs(at(a, n, i, j) - at(a, n, j, i)));
    return m;
}

inline double frobenius(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

struct SymEig {
    std::vector<double> values;    // eigenvalues, unordered
    std::vector<double> vectors;   // row-major; column j is the eigenvector of values[j]
};

// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius mass drops
// below 1e-13 relative to the matrix scale; throws after 100 sweeps.
inline SymEig jacobi_eigen(std::vector<double> a, int n) {
    constexpr int max_sweeps = 100;
    constexpr double tol = 1e-13;

    std::vector<double> v = identity(n);
    const double scale = std::max(1.0, frobenius(a));

    auto off_mass = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += at(a, n, i, j) * at(a, n, i, j);
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_mass() <= tol * scale) {
            SymEig e;
            e.values.resize(n);
            for (int i = 0; i < n; ++i) e.values[i] = at(a, n, i, i);
            e.vectors = std::move(v);
            return e;
        }
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(a, n, p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (at(a, n, q, q) - at(a, n, p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = at(a, n, p, p), aqq = at(a, n, q, q);
                at(a, n, p, q) = 0.0;
                at(a, n, q, p) = 0.0;
                at(a, n, p, p) = app - t * apq;
                at(a, n, q, q) = aqq + t * apq;
                for (int r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = at(a, n, r, p), arq = at(a, n, r, q);
                        at(a, n, r, p) = at(a, n, p, r) = arp - s * (arq + tau * arp);
                        at(a, n, r, q) = at(a, n, q, r) = arq + s * (arp - tau * arq);
                    }
                    const double vrp = at(v, n, r, p), vrq = at(v, n, r, q);
                    at(v, n, r, p) = vrp - s * (vrq + tau * vrp);
                    at(v, n, r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
    }
    throw NumericError("spd eigensolve: Jacobi sweep did not converge within 100 sweeps");
}

// V f(lambda) V^T for a previously computed eigendecomposition.
template <class F>
std::vector<double> compose(const SymEig& e, int n, F&& f) {
    std::vector<double> r(static_cast<size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
        const double fk = f(e.values[k]);
        for (int i = 0; i < n; ++i) {
            const double vik = at(e.vectors, n, i, k);
            for (int j = 0; j < n; ++j) r[static_cast<size_t>(i) * n + j] += fk * vik * at(e.vectors, n, j, k);
        }
    }
    symmetrize(r, n);
    return r;
}

}  // namespace geosub::smat
