#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "geosub/errors.hpp"

// Aberth-Ehrlich simultaneous root iteration for real-coefficient
// polynomials, plus a cluster pass that snaps groups of nearby iterates onto
// a common multiple root when the derivative structure confirms one.

namespace geosub::detail {

using cdouble = std::complex<double>;

// coeffs ascending: p(z) = sum coeffs[k] z^k
inline cdouble poly_eval(const std::vector<double>& coeffs, cdouble z) {
    cdouble r = 0.0;
    for (size_t k = coeffs.size(); k-- > 0;) r = r * z + coeffs[k];
    return r;
}

inline cdouble poly_eval_derivative(const std::vector<double>& coeffs, cdouble z) {
    cdouble r = 0.0;
    for (size_t k = coeffs.size(); k-- > 1;) r = r * z + static_cast<double>(k) * coeffs[k];
    return r;
}

// value of the order-th derivative
inline cdouble poly_eval_kth(const std::vector<double>& coeffs, cdouble z, int order) {
    std::vector<double> c = coeffs;
    for (int d = 0; d < order; ++d) {
        std::vector<double> next(c.size() > 1 ? c.size() - 1 : 0);
        for (size_t k = 1; k < c.size(); ++k) next[k - 1] = static_cast<double>(k) * c[k];
        c = std::move(next);
    }
    return poly_eval(c, z);
}

inline std::vector<cdouble> aberth_roots(const std::vector<double>& coeffs_in) {
    constexpr int max_iterations = 200;
    constexpr double stop_correction = 1e-13;

    const int degree = static_cast<int>(coeffs_in.size()) - 1;
    if (degree < 1) return {};

    // monic copy
    std::vector<double> coeffs(coeffs_in.size());
    const double lead = coeffs_in.back();
    if (lead == 0.0) throw NumericError("root finder: zero leading coefficient");
    for (size_t k = 0; k < coeffs_in.size(); ++k) coeffs[k] = coeffs_in[k] / lead;

    double maxc = 0.0;
    for (int k = 0; k < degree; ++k) maxc = std::max(maxc, std::abs(coeffs[k]));
    const double radius = 1.0 + maxc;

    std::vector<cdouble> z(degree);
    for (int k = 0; k < degree; ++k) {
        const double angle = 2.0 * M_PI * k / degree + 0.4 + 0.01 * k;
        z[k] = radius * cdouble(std::cos(angle), std::sin(angle));
    }

    for (int it = 0; it < max_iterations; ++it) {
        double max_step = 0.0;
        for (int k = 0; k < degree; ++k) {
            const cdouble pv = poly_eval(coeffs, z[k]);
            cdouble dv = poly_eval_derivative(coeffs, z[k]);
            if (std::abs(dv) < 1e-300) dv = 1e-300;
            const cdouble newton = pv / dv;
            cdouble rep = 0.0;
            for (int j = 0; j < degree; ++j) {
                if (j == k) continue;
                cdouble diff = z[k] - z[j];
                if (std::abs(diff) < 1e-300) diff = 1e-300;
                rep += 1.0 / diff;
            }
            cdouble denom = 1.0 - newton * rep;
            if (std::abs(denom) < 1e-300) denom = 1e-300;
            const cdouble step = newton / denom;
            z[k] -= step;
            max_step = std::max(max_step, std::abs(step));
        }
        if (max_step < stop_correction) return z;
    }

    // Iterates around an m-fold root stall at the O(eps^(1/m)) accuracy floor
    // and never meet the correction threshold; accept them when the residual
    // confirms a root (the cluster pass restores full accuracy afterwards).
    for (int k = 0; k < degree; ++k) {
        double mag = 0.0, pw = 1.0;
        for (size_t i = 0; i < coeffs.size(); ++i, pw *= std::abs(z[k])) mag += std::abs(coeffs[i]) * pw;
        if (std::abs(poly_eval(coeffs, z[k])) > 1e-10 * std::max(1.0, mag))
            throw NumericError("root finder: Aberth iteration did not converge within 200 iterations");
    }
    return z;
}

// A few Newton steps in extended precision squeeze the solver error of
// well-separated roots down to the coefficient rounding floor.
inline void polish_roots(const std::vector<double>& coeffs, std::vector<cdouble>& roots) {
    using cldouble = std::complex<long double>;
    std::vector<long double> c(coeffs.begin(), coeffs.end());
    for (cdouble& r : roots) {
        cldouble z(r.real(), r.imag());
        for (int it = 0; it < 4; ++it) {
            cldouble pv = 0.0, dv = 0.0;
            for (size_t k = c.size(); k-- > 1;) {
                pv = pv * z + c[k];
                dv = dv * z + static_cast<long double>(k) * c[k];
            }
            pv = pv * z + c[0];
            if (std::abs(dv) < 1e-300) break;
            const cldouble step = pv / dv;
            z -= step;
            if (std::abs(step) < 1e-18L * (1.0L + std::abs(z))) break;
        }
        const cdouble candidate(static_cast<double>(z.real()), static_cast<double>(z.imag()));
        // keep the polish only if it did not run off (multiple-root iterates
        // may wander; the cluster pass owns those)
        if (std::abs(candidate - r) < 1e-4 * (1.0 + std::abs(r))) r = candidate;
    }
}

// Individual iterates of an m-fold root carry O(eps^(1/m)) error while their
// mean is accurate; detect clusters, confirm the multiplicity through the low
// derivatives, and polish with the multiplicity-aware Newton step m*p/p'.
inline void refine_clusters(const std::vector<double>& coeffs, std::vector<cdouble>& roots) {
    const size_t n = roots.size();
    if (n < 2) return;

    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return;

    std::vector<size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (std::abs(roots[i] - roots[j]) < 1e-4 * (1.0 + std::abs(roots[i]))) parent[find(i)] = find(j);

    std::vector<std::vector<size_t>> groups(n);
    for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

    for (const auto& g : groups) {
        const int m = static_cast<int>(g.size());
        if (m < 2) continue;
        // The iterate mean cancels the leading O(eps^(1/m)) splitting error;
        // Newton on p^(m-1), which has a simple root at an m-fold root of p,
        // then polishes it to full precision.
        cdouble c = 0.0;
        for (size_t i : g) c += roots[i];
        c /= static_cast<double>(m);
        std::vector<double> dpoly = coeffs;
        for (int d = 0; d < m - 1; ++d) {
            std::vector<double> next(dpoly.size() - 1);
            for (size_t k = 1; k < dpoly.size(); ++k) next[k - 1] = static_cast<double>(k) * dpoly[k];
            dpoly = std::move(next);
        }
        for (int it = 0; it < 30; ++it) {
            const cdouble pv = poly_eval(dpoly, c);
            const cdouble dv = poly_eval_derivative(dpoly, c);
            if (std::abs(dv) < 1e-300) break;
            const cdouble step = pv / dv;
            c -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(c))) break;
        }
        bool genuine = true;
        for (int k = 0; k < m && genuine; ++k)
            if (std::abs(poly_eval_kth(coeffs, c, k)) > 1e-6 * scale) genuine = false;
        if (genuine)
            for (size_t i : g) roots[i] = c;
    }
}

}  // namespace geosub::detail
