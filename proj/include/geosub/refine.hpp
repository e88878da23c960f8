#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "geosub/errors.hpp"
#include "geosub/geometry.hpp"
#include "geosub/pyramid.hpp"
#include "geosub/symbol.hpp"

// The global refinement step: double the data, run one geodesic averaging
// round per symbol factor, then shift the indices. On Euclidean data the step
// reproduces the linear scheme S(f)_j = sum a_{j-2i} f_i exactly; the round
// realizing the factor (1+az)/(1+a) therefore places weight 1/(1+a) on the
// right neighbor, and the round of a quadratic factor runs the three pyramid
// of the inverted coefficient 1/a (equivalently, the pyramid of a applied to
// the reversed triple). After the rotate-by-(s-1) shift the step output sits
// at a constant offset of m-1 from the convolution indexing, where m is the
// factor degree m1 + 2*m2.

namespace geosub {

struct RefinementPlan {
    SymbolFactorization factorization;              // ordered: contraction factor first
    Topology boundary = Topology::periodic;
    std::vector<double> real_round_weights;         // weight on the right neighbor, 1/(1+alpha)
    std::vector<ThreePyramidParams> quad_round_params;
};

namespace detail {

inline void check_window(double t, const std::string& what) {
    if (t < -tol::t_max - 1e-12 || t > 1.0 + tol::t_max + 1e-12)
        throw ValidationError(what + " = " + std::to_string(t) + " outside the extrapolation window");
}

}  // namespace detail

inline RefinementPlan make_plan(const SymbolFactorization& factorization, Topology boundary) {
    RefinementPlan plan{order_factors(factorization).factorization, boundary, {}, {}};
    for (double alpha : plan.factorization.real_alphas) {
        if (std::abs(1.0 + alpha) <= 1e-12)
            throw ValidationError("refinement factor alpha = -1 is not averageable");
        const double w = 1.0 / (1.0 + alpha);
        detail::check_window(w, "averaging weight 1/(1+alpha)");
        detail::check_window(1.0 - w, "averaging weight alpha/(1+alpha)");
        plan.real_round_weights.push_back(w);
    }
    for (const cdouble& alpha : plan.factorization.quadratic_alphas) {
        const ThreePyramidParams params = optimal_params(1.0 / alpha);
        detail::check_window(params.t1, "pyramid weight t1");
        detail::check_window(params.t2, "pyramid weight t2");
        plan.quad_round_params.push_back(params);
    }
    return plan;
}

struct TraceRound {
    enum class Kind { doubled, linear, quadratic };
    Kind kind;
    cdouble alpha;   // factor coefficient; meaningless for Kind::doubled
    bool has_alpha;
    double delta;    // mesh size after the round
};

struct RefinementTrace {
    std::vector<TraceRound> rounds;
    int shift = 0;   // s; in open mode the parametric origin offset is s-1
};

// q_{2i} = q_{2i+1} = p_i; the mesh size is unchanged.
inline Polyline elementary_double(const Polyline& p) {
    std::vector<ManifoldPoint> out;
    out.reserve(2 * p.size());
    for (const auto& pt : p.points()) {
        out.push_back(pt);
        out.push_back(pt);
    }
    return Polyline::unchecked(std::move(out), p.topology());
}

namespace detail {

inline Polyline averaging_round(const Polyline& q, double weight_on_right) {
    const size_t n = q.size();
    auto average = [&](size_t i) {
        try {
            return geodesic_point(q[i], q[(i + 1) % n], weight_on_right);
        } catch (const NumericError& e) {
            throw NumericError("index " + std::to_string(i) + ": " + e.what());
        }
    };
    std::vector<ManifoldPoint> out;
    if (q.topology() == Topology::periodic) {
        out.reserve(n);
        for (size_t i = 0; i < n; ++i) out.push_back(average(i));
    } else {
        if (n < 2) throw NumericError("averaging round needs at least 2 points");
        out.reserve(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) out.push_back(average(i));
    }
    return Polyline::unchecked(std::move(out), q.topology());
}

}  // namespace detail

// One averaging round with weights (1/(1+alpha), alpha/(1+alpha)) on each
// adjacent pair: output i is M_{alpha/(1+alpha)}(q_i, q_{i+1}).
inline Polyline linear_round(const Polyline& q, double alpha) {
    if (std::abs(1.0 + alpha) <= 1e-12) throw ValidationError("linear round requires alpha != -1");
    const double w = alpha / (1.0 + alpha);
    detail::check_window(w, "averaging weight alpha/(1+alpha)");
    return detail::averaging_round(q, w);
}

// One three-pyramid round: output i is P(q_i, q_{i+1}, q_{i+2}).
inline Polyline quadratic_round(const Polyline& q, const ThreePyramidParams& params) {
    if (!(params.r > 0.0 && params.r < 1.0))
        throw ValidationError("quadratic rounds require the interior parameter r in (0,1)");
    const size_t n = q.size();
    auto average = [&](size_t i) {
        try {
            return three_pyramid_average(q[i], q[(i + 1) % n], q[(i + 2) % n], params);
        } catch (const NumericError& e) {
            throw NumericError("index " + std::to_string(i) + ": " + e.what());
        }
    };
    std::vector<ManifoldPoint> out;
    if (n < 3) throw NumericError("quadratic round needs at least 3 points");
    if (q.topology() == Topology::periodic) {
        out.reserve(n);
        for (size_t i = 0; i < n; ++i) out.push_back(average(i));
    } else {
        out.reserve(n - 2);
        for (size_t i = 0; i + 2 < n; ++i) out.push_back(average(i));
    }
    return Polyline::unchecked(std::move(out), q.topology());
}

struct GlobalStepResult {
    Polyline refined;
    RefinementTrace trace;
};

inline GlobalStepResult global_refine_step(const Polyline& p, const RefinementPlan& plan) {
    if (p.topology() != plan.boundary)
        throw ValidationError("polyline topology does not match the plan boundary mode");

    RefinementTrace trace;
    trace.shift = plan.factorization.shift;

    Polyline q = elementary_double(p);
    trace.rounds.push_back({TraceRound::Kind::doubled, 0.0, false, mesh_size(q)});

    size_t round_index = 1;
    auto annotate = [&round_index](const char* kind, const NumericError& e) {
        return NumericError("round " + std::to_string(round_index) + " (" + kind + "): " + e.what());
    };

    for (size_t k = 0; k < plan.real_round_weights.size(); ++k, ++round_index) {
        try {
            q = detail::averaging_round(q, plan.real_round_weights[k]);
        } catch (const NumericError& e) {
            throw annotate("linear", e);
        }
        trace.rounds.push_back({TraceRound::Kind::linear, plan.factorization.real_alphas[k], true, mesh_size(q)});
    }
    for (size_t k = 0; k < plan.quad_round_params.size(); ++k, ++round_index) {
        try {
            q = quadratic_round(q, plan.quad_round_params[k]);
        } catch (const NumericError& e) {
            throw annotate("quadratic", e);
        }
        trace.rounds.push_back(
            {TraceRound::Kind::quadratic, plan.factorization.quadratic_alphas[k], true, mesh_size(q)});
    }

    std::vector<ManifoldPoint> out;
    out.reserve(q.size());
    if (plan.boundary == Topology::periodic) {
        const long n = static_cast<long>(q.size());
        const long rot = plan.factorization.shift - 1;
        for (long j = 0; j < n; ++j) out.push_back(q[static_cast<size_t>(((j + rot) % n + n) % n)]);
    } else {
        if (q.size() < 2) throw NumericError("open refinement shrank below 2 points; plan too long for the data");
        out = q.points();
    }

    // sphere / SO(3) outputs must still form an admissible sequence
    if (p.kind().family() == ManifoldFamily::sphere || p.kind().family() == ManifoldFamily::rotations3d) {
        const size_t pairs = plan.boundary == Topology::periodic ? out.size() : out.size() - 1;
        for (size_t i = 0; i < pairs; ++i)
            if (!admissible(out[i], out[(i + 1) % out.size()]))
                throw NumericError("refined pair " + std::to_string(i) + " left the admissible chart");
    }
    return {Polyline::unchecked(std::move(out), plan.boundary), std::move(trace)};
}

struct SubdivisionResult {
    Polyline refined;
    std::vector<RefinementTrace> traces;  // one per step, deltas after every round
};

// k composed refinement steps; k = 0 is the identity.
inline SubdivisionResult subdivide(const Polyline& p, const RefinementPlan& plan, int steps) {
    if (steps < 0) throw ValidationError("subdivision step count must be >= 0");
    SubdivisionResult result{p, {}};
    for (int k = 0; k < steps; ++k) {
        GlobalStepResult step = global_refine_step(result.refined, plan);
        result.refined = std::move(step.refined);
        result.traces.push_back(std::move(step.trace));
    }
    return result;
}

// Pointwise pyramid recomputation of the global step for plans with real
// factors only, periodic boundary. Output index o recomputes the averaging
// cascade that the global step evaluates at pre-shift index o + s - 1: the
// seed row alternates the duplicated points with the first-round averages,
// then folds once per remaining factor.
inline Polyline local_refine_step(const Polyline& p, const RefinementPlan& plan) {
    if (!plan.quad_round_params.empty())
        throw ValidationError("local refinement supports real symbol factors only");
    if (p.topology() != Topology::periodic || plan.boundary != Topology::periodic)
        throw ValidationError("local refinement requires periodic boundary");

    const long n = static_cast<long>(p.size());
    const long out_len = 2 * n;
    const int m = plan.factorization.m1();

    std::vector<ManifoldPoint> out;
    out.reserve(static_cast<size_t>(out_len));
    for (long o = 0; o < out_len; ++o) {
        const long base = (((o + plan.factorization.shift - 1) % out_len) + out_len) % out_len;
        if (m == 0) {
            out.push_back(p[static_cast<size_t>(base / 2)]);
            continue;
        }
        std::vector<ManifoldPoint> level;
        level.reserve(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) {
            const long idx = (base + k) % out_len;
            const long cell = idx / 2;
            if (idx % 2 == 0)
                level.push_back(p[static_cast<size_t>(cell)]);
            else
                level.push_back(geodesic_point(p[static_cast<size_t>(cell)],
                                               p[static_cast<size_t>((cell + 1) % n)],
                                               plan.real_round_weights[0]));
        }
        for (int j = 1; j < m; ++j) {
            for (size_t i = 0; i + 1 < level.size(); ++i)
                level[i] = geodesic_point(level[i], level[i + 1], plan.real_round_weights[static_cast<size_t>(j)]);
            level.pop_back();
        }
        out.push_back(level.front());
    }
    return Polyline::unchecked(std::move(out), Topology::periodic);
}

// The linear refinement rule S(f)_j = sum_i a_{j-2i} f_i on a periodic real
// sequence; the Euclidean oracle for the global step.
inline std::vector<double> linear_refine(const std::vector<double>& f, const Mask& mask) {
    if (f.empty()) throw ValidationError("linear_refine needs a nonempty sequence");
    const long n = static_cast<long>(f.size());
    const long out_len = 2 * n;
    std::vector<double> out(static_cast<size_t>(out_len), 0.0);
    const auto& c = mask.coefficients();
    for (long i = 0; i < n; ++i)
        for (size_t k = 0; k < c.size(); ++k) {
            const long j = 2 * i + mask.first_index() + static_cast<long>(k);
            out[static_cast<size_t>(((j % out_len) + out_len) % out_len)] += c[k] * f[static_cast<size_t>(i)];
        }
    return out;
}

// Index correspondence between the global step output and linear_refine:
// out_j = S(f)_{(j + offset) mod 2N}.
inline int oracle_offset(const RefinementPlan& plan) {
    return plan.factorization.total_factor_degree() - 1;
}

}  // namespace geosub
