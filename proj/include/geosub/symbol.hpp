#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geosub/errors.hpp"
#include "geosub/polyroots.hpp"

// Subdivision masks, their symbols a(z) = sum a_i z^i, and the factorization
// a(z) = z^{-s} (1+z) prod (1+a_k z)/(1+a_k) prod (quadratic factors), where
// each factor coefficient a_k = -1/r_k comes from a nonzero root r_k of the
// deflated symbol.

namespace geosub {

using cdouble = std::complex<double>;

namespace symtol {
inline constexpr double sums = 1e-10;   // a(1)=2 and a(-1)=0 residuals
inline constexpr double root = 1e-8;    // root -1 detection / conjugate pairing
inline constexpr double near_minus_one = 1e-8;
inline constexpr double quad_denominator = 1e-10;
}  // namespace symtol

class Mask {
public:
    Mask(std::vector<double> coefficients, int first_index)
        : coefficients_(std::move(coefficients)), first_index_(first_index) {
        if (coefficients_.empty()) throw ValidationError("mask must have at least one coefficient");
        double scale = 0.0;
        for (double c : coefficients_) scale = std::max(scale, std::abs(c));
        if (scale == 0.0) throw ValidationError("mask is identically zero");
        const double cut = 1e-14 * scale;
        size_t lo = 0, hi = coefficients_.size();
        while (lo < hi && std::abs(coefficients_[lo]) <= cut) ++lo;
        while (hi > lo && std::abs(coefficients_[hi - 1]) <= cut) --hi;
        first_index_ += static_cast<int>(lo);
        coefficients_.assign(coefficients_.begin() + static_cast<long>(lo),
                             coefficients_.begin() + static_cast<long>(hi));
    }

    [[nodiscard]] const std::vector<double>& coefficients() const { return coefficients_; }
    [[nodiscard]] int first_index() const { return first_index_; }
    [[nodiscard]] int degree() const { return static_cast<int>(coefficients_.size()) - 1; }

    [[nodiscard]] double sum() const {
        double s = 0.0;
        for (double c : coefficients_) s += c;
        return s;
    }
    [[nodiscard]] double alternating_sum() const {
        double s = 0.0;
        for (size_t k = 0; k < coefficients_.size(); ++k) {
            const int idx = first_index_ + static_cast<int>(k);
            s += (idx % 2 == 0 ? coefficients_[k] : -coefficients_[k]);
        }
        return s;
    }

private:
    std::vector<double> coefficients_;
    int first_index_;
};

struct MaskDiagnostic {
    bool ok;
    std::string message;  // names the violated condition and the residual
};

// Necessary convergence conditions a(1) = 2 and a(-1) = 0.
inline MaskDiagnostic validate(const Mask& mask) {
    const double r1 = mask.sum() - 2.0;
    if (std::abs(r1) > symtol::sums)
        return {false, "a(1) = " + std::to_string(mask.sum()) + " differs from 2 by " + std::to_string(r1)};
    const double rm1 = mask.alternating_sum();
    if (std::abs(rm1) > symtol::sums)
        return {false, "a(-1) = " + std::to_string(rm1) + " differs from 0"};
    return {true, "ok"};
}

struct SymbolFactorization {
    int shift = 0;                         // s, with z^{-s} absorbing the index offset
    std::vector<double> real_alphas;       // each != -1
    std::vector<cdouble> quadratic_alphas; // one representative per conjugate pair, Im > 0

    [[nodiscard]] int m1() const { return static_cast<int>(real_alphas.size()); }
    [[nodiscard]] int m2() const { return static_cast<int>(quadratic_alphas.size()); }
    [[nodiscard]] int total_factor_degree() const { return m1() + 2 * m2(); }
};

// max(1/(1+a), a/(1+a)) -- the contractivity candidate of a positive factor.
inline double factor_mu(double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("factor_mu requires a positive factor");
    return std::max(1.0 / (1.0 + alpha), alpha / (1.0 + alpha));
}

struct FactorOrdering {
    SymbolFactorization factorization;
    bool has_contraction_factor;  // false when no positive real factor exists
};

// Moves the positive factor minimizing factor_mu to the front (ties broken by
// ascending |alpha-1|), then the remaining positive factors, then the
// negative ones, preserving relative input order inside each group. With no
// positive factor the input is returned flagged; the analysis module turns
// that into a not-certified verdict.
inline FactorOrdering order_factors(const SymbolFactorization& f) {
    std::vector<double> positives, negatives;
    for (double a : f.real_alphas) (a > 0.0 ? positives : negatives).push_back(a);

    SymbolFactorization out = f;
    if (positives.empty()) return {out, false};

    size_t best = 0;
    for (size_t i = 1; i < positives.size(); ++i) {
        const double mi = factor_mu(positives[i]), mb = factor_mu(positives[best]);
        if (mi < mb - 1e-15 ||
            (std::abs(mi - mb) <= 1e-15 && std::abs(positives[i] - 1.0) < std::abs(positives[best] - 1.0)))
            best = i;
    }

    out.real_alphas.clear();
    out.real_alphas.push_back(positives[best]);
    for (size_t i = 0; i < positives.size(); ++i)
        if (i != best) out.real_alphas.push_back(positives[i]);
    out.real_alphas.insert(out.real_alphas.end(), negatives.begin(), negatives.end());
    return {out, true};
}

namespace detail {

inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

}  // namespace detail

// Expands z^{-s} (1+z) prod (1+az)/(1+a) prod (1+2Re(a)z+|a|^2 z^2)/(1+2Re(a)+|a|^2).
inline Mask reconstruct(const SymbolFactorization& f) {
    std::vector<double> poly = {1.0, 1.0};  // the (1+z) factor
    for (double a : f.real_alphas) {
        const double d = 1.0 + a;
        if (std::abs(d) <= symtol::near_minus_one)
            throw NumericError("factor alpha too close to -1, normalization 1/(1+alpha) blows up");
        poly = detail::convolve(poly, {1.0 / d, a / d});
    }
    for (const cdouble& a : f.quadratic_alphas) {
        const double d = 1.0 + 2.0 * a.real() + std::norm(a);
        if (d <= symtol::quad_denominator) throw NumericError("quadratic factor denominator is not positive");
        poly = detail::convolve(poly, {1.0 / d, 2.0 * a.real() / d, std::norm(a) / d});
    }
    return Mask(std::move(poly), -f.shift);
}

// Binomial mask (1+z)^{m+1} / 2^m of the degree-m B-spline scheme.
inline Mask bspline_mask(int m) {
    if (m < 1) throw ValidationError("b-spline degree must be >= 1");
    std::vector<double> c(static_cast<size_t>(m) + 2);
    double binom = 1.0;
    for (int k = 0; k <= m + 1; ++k) {
        c[static_cast<size_t>(k)] = binom / std::exp2(m);
        binom = binom * (m + 1 - k) / (k + 1);
    }
    return Mask(std::move(c), 0);
}

namespace detail {

// One synthetic division by (z+1); the remainder is p(-1).
inline std::pair<std::vector<double>, double> divide_out_minus_one(const std::vector<double>& p) {
    const size_t n = p.size() - 1;
    std::vector<double> q(n);
    q[n - 1] = p[n];
    for (size_t k = n - 1; k-- > 0;) q[k] = p[k + 1] - q[k + 1];
    const double remainder = p[0] - q[0];
    return {std::move(q), remainder};
}

inline double eval_at_minus_one(const std::vector<double>& p) {
    double s = 0.0;
    for (size_t k = 0; k < p.size(); ++k) s += (k % 2 == 0 ? p[k] : -p[k]);
    return s;
}

}  // namespace detail

// Factors a validated mask: splits off z^{-s} and one (1+z), then converts
// the nonzero roots r_k of the deflated polynomial into factors a_k = -1/r_k.
// Multiplicities of the root -1 beyond the first show up as factors a = 1.
inline SymbolFactorization factorize(const Mask& mask) {
    const MaskDiagnostic diag = validate(mask);
    if (!diag.ok) throw ValidationError("factorize requires a valid mask: " + diag.message);

    SymbolFactorization out;
    out.shift = -mask.first_index();

    std::vector<double> p = mask.coefficients();
    double scale = 0.0;
    for (double c : p) scale = std::max(scale, std::abs(c));

    if (p.size() < 2 || std::abs(detail::eval_at_minus_one(p)) > symtol::root * scale)
        throw NumericError("symbol has no root at -1; the (1+z) factor cannot be divided out");
    p = detail::divide_out_minus_one(p).first;

    // further exact multiplicities of -1 become factors alpha = 1
    auto coeff_scale = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double c : v) s = std::max(s, std::abs(c));
        return s;
    };
    while (p.size() >= 2 && std::abs(detail::eval_at_minus_one(p)) <= 1e-10 * coeff_scale(p)) {
        p = detail::divide_out_minus_one(p).first;
        out.real_alphas.push_back(1.0);
    }

    if (p.size() >= 2) {
        auto roots = detail::aberth_roots(p);
        detail::polish_roots(p, roots);
        detail::refine_clusters(p, roots);

        std::vector<cdouble> upper, lower;
        for (const cdouble& r : roots) {
            if (std::abs(r) < 1e-12)
                throw NumericError("deflated symbol has a zero root; mask trimming failed");
            if (std::abs(r.imag()) <= symtol::root * (1.0 + std::abs(r.real()))) {
                const double alpha = -1.0 / r.real();
                if (std::abs(alpha + 1.0) <= symtol::near_minus_one)
                    throw NumericError("factor alpha too close to -1, normalization 1/(1+alpha) blows up");
                out.real_alphas.push_back(alpha);
            } else if (r.imag() > 0.0) {
                upper.push_back(r);
            } else {
                lower.push_back(r);
            }
        }

        if (upper.size() != lower.size())
            throw NumericError("complex roots do not pair into conjugates");
        std::vector<bool> used(lower.size(), false);
        for (const cdouble& r : upper) {
            size_t best = lower.size();
            double best_d = symtol::root * (1.0 + std::abs(r));
            for (size_t j = 0; j < lower.size(); ++j) {
                if (used[j]) continue;
                const double d = std::abs(std::conj(r) - lower[j]);
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            if (best == lower.size())
                throw NumericError("complex root has no conjugate partner within tolerance");
            used[best] = true;
            const cdouble root = 0.5 * (r + std::conj(lower[best]));
            cdouble alpha = -1.0 / root;
            if (alpha.imag() < 0.0) alpha = std::conj(alpha);
            const double d = 1.0 + 2.0 * alpha.real() + std::norm(alpha);
            if (d <= symtol::quad_denominator)
                throw NumericError("quadratic factor denominator is not positive");
            out.quadratic_alphas.push_back(alpha);
        }
    }

    std::sort(out.real_alphas.begin(), out.real_alphas.end());
    std::sort(out.quadratic_alphas.begin(), out.quadratic_alphas.end(), [](const cdouble& a, const cdouble& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return order_factors(out).factorization;
}

}  // namespace geosub
