#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geosub/errors.hpp"
#include "geosub/pyramid.hpp"
#include "geosub/refine.hpp"
#include "geosub/symbol.hpp"

// Convergence certification from arbitrary admissible data: the contractivity
// factor mu = mu1 * prod xi(alpha_i), displacement constants, and the complex
// domain Omega outside of which a single quadratic factor keeps the scheme
// contractive. Everything is a closed form; the empirical runner measures the
// certified bounds on real data.

namespace geosub {

// Initial contractivity factor: the min-max over positive real factors.
inline std::optional<double> mu1_of(const SymbolFactorization& f) {
    std::optional<double> best;
    for (double a : f.real_alphas)
        if (a > 0.0) {
            const double m = factor_mu(a);
            if (!best || m < *best) best = m;
        }
    return best;
}

// Expansion factor of one averaging round.
inline double xi(double alpha) {
    if (std::abs(1.0 + alpha) <= 1e-12) throw ValidationError("xi is undefined at alpha = -1");
    if (alpha >= 0.0) return 1.0;
    if (alpha > -1.0) return 1.0 + 2.0 * std::abs(alpha / (1.0 + alpha));
    return 1.0 + 2.0 * std::abs(1.0 / (1.0 + alpha));
}

// Expansion factor of one three-pyramid round at the optimal r; equals
// expansion_bound(optimal_params(alpha)).
inline double xi(const cdouble& alpha) {
    if (alpha.imag() == 0.0) return xi(alpha.real());
    const double d = 1.0 + 2.0 * alpha.real() + std::norm(alpha);
    if (d <= 1e-10) throw NumericError("quadratic factor denominator is not positive");
    return 1.0 + 2.0 * (2.0 * (std::abs(alpha) - alpha.real()) / d);
}

enum class OmegaVerdict { inside, outside, boundary };

inline const char* to_string(OmegaVerdict v) {
    switch (v) {
        case OmegaVerdict::inside: return "inside";
        case OmegaVerdict::outside: return "outside";
        case OmegaVerdict::boundary: return "boundary";
    }
    return "?";
}

namespace detail {

inline void require_mu1(double mu1) {
    if (!(mu1 >= 0.5 && mu1 < 1.0)) throw ValidationError("mu1 must lie in [1/2, 1)");
}

// c(phi) = gamma(1 - cos phi) - cos phi with gamma = 2 mu1 / (1 - mu1)
inline double omega_c(double mu1, double phi) {
    return -((1.0 + mu1) / (1.0 - mu1)) * std::cos(phi) + 2.0 * mu1 / (1.0 - mu1);
}

}  // namespace detail

// Angular half-width of the unconstrained sector around the positive real
// axis: arccos((3 mu1 - 1)/(1 + mu1)). Equals arccos(1/3) at mu1 = 1/2 and
// shrinks toward 0 as mu1 approaches 1.
inline double upsilon(double mu1) {
    detail::require_mu1(mu1);
    return std::acos((3.0 * mu1 - 1.0) / (1.0 + mu1));
}

// Membership of alpha = rho e^{i phi} in Omega, decided through the parabola
// h(rho) = rho^2 - 2 c(phi) rho + 1: h < 0 is inside, h > 0 outside, and
// |h| <= 1e-12 (1 + rho^2) is the boundary (which includes the two tangency
// points at rho = 1, |phi| = upsilon). Outside is equivalent to the adapted
// single-quadratic-factor scheme having a certified contractivity factor,
// 2(t1 - t2) + 1 < 1/mu1.
inline OmegaVerdict omega_membership(const cdouble& alpha, double mu1) {
    detail::require_mu1(mu1);
    if (alpha.imag() == 0.0) throw ValidationError("omega membership is defined for non-real alpha");
    const double rho = std::abs(alpha);
    const double phi = std::atan2(alpha.imag(), alpha.real());
    const double h = rho * rho - 2.0 * detail::omega_c(mu1, phi) * rho + 1.0;
    if (std::abs(h) <= 1e-12 * (1.0 + rho * rho)) return OmegaVerdict::boundary;
    return h < 0.0 ? OmegaVerdict::inside : OmegaVerdict::outside;
}

struct OmegaBoundarySample {
    double phi, rho1, rho2;
};

// Samples the two boundary curves rho_{1,2}(phi) = c -/+ sqrt(c^2 - 1) for
// phi strictly inside (upsilon, 2 pi - upsilon).
inline std::vector<OmegaBoundarySample> omega_boundary(double mu1, int n_samples) {
    detail::require_mu1(mu1);
    if (n_samples < 1) throw ValidationError("omega boundary needs at least one sample");
    const double up = upsilon(mu1);
    std::vector<OmegaBoundarySample> rows;
    rows.reserve(static_cast<size_t>(n_samples));
    for (int k = 1; k <= n_samples; ++k) {
        const double phi = up + k * (2.0 * M_PI - 2.0 * up) / (n_samples + 1);
        const double c = detail::omega_c(mu1, phi);
        const double root = std::sqrt(std::max(0.0, c * c - 1.0));
        rows.push_back({phi, c - root, c + root});
    }
    return rows;
}

struct XiFactor {
    cdouble alpha;
    bool is_real;
    double value;
};

enum class Verdict { certified_convergent, not_certified };

struct ConvergenceReport {
    std::optional<double> mu1;
    std::vector<XiFactor> xi_factors;                      // factors beyond alpha_1
    std::optional<double> mu;                              // mu1 * prod xi
    double displacement_K = 1.0;
    std::vector<std::pair<cdouble, OmegaVerdict>> omega_verdicts;
    Verdict verdict = Verdict::not_certified;
    std::string reason;
};

// Displacement-safe constant from the per-factor recurrences, using the worst
// applicable branch: mu1 per extra positive round when all real factors are
// positive, 2 per real round past the first with mixed signs, 3/2 per
// pyramid round.
inline double displacement_constant(const SymbolFactorization& ordered, std::optional<double> mu1) {
    const int m1 = ordered.m1();
    bool any_negative = false;
    for (double a : ordered.real_alphas) any_negative |= (a < 0.0);

    double k = 1.0;
    if (m1 >= 1) {
        if (any_negative)
            k = 1.0 + 2.0 * m1;
        else
            k = 1.0 + (m1 - 1) * (mu1 ? *mu1 : 1.0);
    }
    return k + 1.5 * ordered.m2();
}

inline ConvergenceReport contractivity(const SymbolFactorization& f) {
    const FactorOrdering ordering = order_factors(f);
    const SymbolFactorization& fac = ordering.factorization;

    ConvergenceReport report;
    report.mu1 = mu1_of(fac);

    const size_t real_start = ordering.has_contraction_factor ? 1 : 0;
    for (size_t i = real_start; i < fac.real_alphas.size(); ++i)
        report.xi_factors.push_back({fac.real_alphas[i], true, xi(fac.real_alphas[i])});
    for (const cdouble& a : fac.quadratic_alphas) report.xi_factors.push_back({a, false, xi(a)});

    report.displacement_K = displacement_constant(fac, report.mu1);

    if (report.mu1) {
        double mu = *report.mu1;
        for (const XiFactor& x : report.xi_factors) mu *= x.value;
        report.mu = mu;
        for (const cdouble& a : fac.quadratic_alphas)
            report.omega_verdicts.emplace_back(a, omega_membership(a, *report.mu1));
        if (mu < 1.0) {
            report.verdict = Verdict::certified_convergent;
        } else {
            report.verdict = Verdict::not_certified;
            report.reason = "contractivity product mu = " + std::to_string(mu) + " is not below 1";
        }
    } else {
        report.verdict = Verdict::not_certified;
        report.reason = fac.total_factor_degree() == 0
                            ? "symbol has no averaging factors; the step only duplicates data"
                            : "no positive real factor supplies an initial contraction";
    }
    return report;
}

// Sufficient uniform bound on every quadratic factor:
// xi(alpha) < ((1/mu1) * prod_{real, i >= 2} xi(alpha_i))^(1/m2).
inline bool uniform_complex_bound(const SymbolFactorization& f) {
    const FactorOrdering ordering = order_factors(f);
    if (!ordering.has_contraction_factor)
        throw ValidationError("uniform complex bound requires a positive real factor");
    const SymbolFactorization& fac = ordering.factorization;
    if (fac.m2() < 1) throw ValidationError("uniform complex bound requires a quadratic factor");

    const double mu1 = factor_mu(fac.real_alphas.front());
    double prod = 1.0 / mu1;
    for (size_t i = 1; i < fac.real_alphas.size(); ++i) prod *= xi(fac.real_alphas[i]);
    const double limit = std::pow(prod, 1.0 / fac.m2());
    for (const cdouble& a : fac.quadratic_alphas)
        if (!(xi(a) < limit)) return false;
    return true;
}

struct ContractionRatio {
    double ratio;
    bool degenerate;  // previous mesh size was (numerically) zero
};

// Measured per-step mesh-size ratios delta(S^{k+1} p) / delta(S^k p).
inline std::vector<ContractionRatio> empirical_contraction(const Polyline& p, const RefinementPlan& plan,
                                                           int steps) {
    std::vector<ContractionRatio> ratios;
    ratios.reserve(static_cast<size_t>(std::max(steps, 0)));
    double prev = mesh_size(p);
    Polyline current = p;
    for (int k = 0; k < steps; ++k) {
        current = global_refine_step(current, plan).refined;
        const double next = mesh_size(current);
        if (prev <= 1e-14)
            ratios.push_back({0.0, true});
        else
            ratios.push_back({next / prev, false});
        prev = next;
    }
    return ratios;
}

}  // namespace geosub
