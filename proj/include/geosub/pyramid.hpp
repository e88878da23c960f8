#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "geosub/errors.hpp"
#include "geosub/geometry.hpp"

// Three-point geodesic average realizing an irreducible quadratic symbol
// factor: P((p1,p2,p3),(w1,w2,w3)) = M_r(M_{t2}(p3,p2), M_{t1}(p2,p1)), with
// t1*r = w1, (1-t1)r + t2(1-r) = w2, (1-t2)(1-r) = w3. On Euclidean data this
// is exactly w1*p1 + w2*p2 + w3*p3.

namespace geosub {

using cdouble = std::complex<double>;

struct QuadraticWeights {
    double w1, w2, w3;

    QuadraticWeights(double w1_, double w2_, double w3_) : w1(w1_), w2(w2_), w3(w3_) {
        if (std::abs(w1 + w2 + w3 - 1.0) > 1e-12) throw ValidationError("pyramid weights must sum to 1");
        if (!(w1 > 0.0) || !(w3 > 0.0)) throw ValidationError("outer pyramid weights must be positive");
    }
};

struct ThreePyramidParams {
    QuadraticWeights weights;
    double r, t1, t2;

    ThreePyramidParams(QuadraticWeights w, double r_, double t1_, double t2_)
        : weights(w), r(r_), t1(t1_), t2(t2_) {
        const double scale = 1.0 + std::abs(t1) + std::abs(t2) + std::abs(r);
        if (std::abs(t1 * r - weights.w1) > 1e-12 * scale)
            throw ValidationError("pyramid constraint t1*r = w1 violated");
        if (std::abs((1.0 - t2) * (1.0 - r) - weights.w3) > 1e-12 * scale)
            throw ValidationError("pyramid constraint (1-t2)(1-r) = w3 violated");
        if (r > 0.0 && r < 1.0 && !(t1 > t2 - 1e-14))
            throw ValidationError("pyramid with interior r must have t1 > t2");
    }
};

namespace detail {

inline double quad_denominator(const cdouble& alpha) {
    return 1.0 + 2.0 * alpha.real() + std::norm(alpha);
}

inline void require_nonreal(const cdouble& alpha) {
    if (alpha.imag() == 0.0) throw ValidationError("quadratic factor requires a non-real alpha");
    if (quad_denominator(alpha) <= 1e-10)
        throw NumericError("quadratic factor denominator 1+2Re(a)+|a|^2 is not positive");
}

}  // namespace detail

// (w1, w2, w3) = (1, 2Re(a), |a|^2) / (1 + 2Re(a) + |a|^2)
inline QuadraticWeights weights_from_alpha(const cdouble& alpha) {
    detail::require_nonreal(alpha);
    const double d = detail::quad_denominator(alpha);
    return {1.0 / d, 2.0 * alpha.real() / d, std::norm(alpha) / d};
}

// Parameters for a caller-chosen r: t1 = w1/r, t2 = 1 - w3/(1-r). Exists for
// table reproduction and experiments; refinement plans always use the
// optimal r below.
inline ThreePyramidParams params_for_r(const cdouble& alpha, double r) {
    detail::require_nonreal(alpha);
    if (std::abs(r) < 1e-12 || std::abs(1.0 - r) < 1e-12)
        throw ValidationError("pyramid parameter r must differ from 0 and 1");
    const QuadraticWeights w = weights_from_alpha(alpha);
    return {w, r, w.w1 / r, 1.0 - w.w3 / (1.0 - r)};
}

// r = 1/(1+|a|) minimizes t1 - t2 and with it the pyramid expansion bound.
inline ThreePyramidParams optimal_params(const cdouble& alpha) {
    detail::require_nonreal(alpha);
    const double d = detail::quad_denominator(alpha);
    const double mod = std::abs(alpha);
    const QuadraticWeights w = weights_from_alpha(alpha);
    return {w, 1.0 / (1.0 + mod), (mod + 1.0) / d, (1.0 + 2.0 * alpha.real() - mod) / d};
}

// Nested geodesic evaluation M_r(M_{t2}(p3,p2), M_{t1}(p2,p1)).
inline ManifoldPoint three_pyramid_average(const ManifoldPoint& p1, const ManifoldPoint& p2,
                                           const ManifoldPoint& p3, const ThreePyramidParams& params) {
    auto annotate = [](const char* which, const Error& e) {
        return NumericError(std::string(which) + " of the three pyramid failed: " + e.what());
    };
    ManifoldPoint inner_right = [&] {
        try {
            return geodesic_point(p3, p2, params.t2);
        } catch (const NumericError& e) {
            throw annotate("inner average M_t2(p3,p2)", e);
        }
    }();
    ManifoldPoint inner_left = [&] {
        try {
            return geodesic_point(p2, p1, params.t1);
        } catch (const NumericError& e) {
            throw annotate("inner average M_t1(p2,p1)", e);
        }
    }();
    try {
        return geodesic_point(inner_right, inner_left, params.r);
    } catch (const NumericError& e) {
        throw annotate("outer average M_r", e);
    }
}

// 2(t1-t2)+1 bounds the distance between the pyramids of two adjacent point
// triples relative to the mesh size; valid for interior r only.
inline double expansion_bound(const ThreePyramidParams& params) {
    if (!(params.r > 0.0 && params.r < 1.0))
        throw ValidationError("expansion bound is only valid for r in (0,1)");
    return 2.0 * (params.t1 - params.t2) + 1.0;
}

}  // namespace geosub
