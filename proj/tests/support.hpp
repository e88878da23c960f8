#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "geosub/geosub.hpp"

// Shared generators and measurement helpers for the unit and acceptance
// suites. Generators are deterministic given the caller's engine; every
// produced polyline is admissible (wrap pair included for periodic data).

namespace testsupport {

using namespace geosub;

inline double uniform(std::mt19937& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Coordinate-level gap between two points of the same kind; immune to the
// angular noise floor of metric distances between near-identical points.
// Rotations compare both quaternion signs.
inline double point_gap(const ManifoldPoint& a, const ManifoldPoint& b) {
    double s_diff = 0.0, s_sum = 0.0;
    for (size_t i = 0; i < a.data().size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        const double s = a.data()[i] + b.data()[i];
        s_diff += d * d;
        s_sum += s * s;
    }
    if (a.kind().family() == ManifoldFamily::rotations3d) return std::sqrt(std::min(s_diff, s_sum));
    return std::sqrt(s_diff);
}

inline ManifoldPoint random_unit(std::mt19937& rng, int dim) {
    std::vector<double> v(static_cast<size_t>(dim));
    std::normal_distribution<double> gauss(0.0, 1.0);
    double n = 0.0;
    while (n < 1e-6) {
        for (double& x : v) x = gauss(rng);
        n = 0.0;
        for (double x : v) n += x * x;
        n = std::sqrt(n);
    }
    for (double& x : v) x /= n;
    return {dim == 4 ? ManifoldKind::rotations3d() : ManifoldKind::sphere(dim), v};
}

inline ManifoldPoint sphere_step(std::mt19937& rng, const ManifoldPoint& p, double max_step) {
    while (true) {
        std::vector<double> v(3);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double& x : v) x = gauss(rng);
        const double step = uniform(rng, 0.25, 1.0) * max_step;
        std::vector<double> q(3);
        double n = 0.0;
        for (int i = 0; i < 3; ++i) q[i] = p.data()[static_cast<size_t>(i)] + step * v[static_cast<size_t>(i)];
        for (double x : q) n += x * x;
        n = std::sqrt(n);
        if (n < 1e-6) continue;
        for (double& x : q) x /= n;
        const ManifoldPoint cand(ManifoldKind::sphere(3), q);
        const double d = distance(p, cand);
        if (d > 1e-3 && d < max_step) return cand;
    }
}

inline ManifoldPoint quat_step(std::mt19937& rng, const ManifoldPoint& p, double max_step) {
    while (true) {
        std::vector<double> q(4);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double n = 0.0;
        for (size_t i = 0; i < 4; ++i) q[i] = p.data()[i] + 0.5 * max_step * gauss(rng);
        for (double x : q) n += x * x;
        n = std::sqrt(n);
        if (n < 1e-6) continue;
        for (double& x : q) x /= n;
        const ManifoldPoint cand(ManifoldKind::rotations3d(), q);
        const double d = distance(p, cand);
        if (d > 1e-3 && d < max_step) return cand;
    }
}

inline ManifoldPoint spd_step(std::mt19937& rng, const ManifoldPoint& p, double max_step) {
    const int n = p.kind().side();
    std::vector<double> s(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = uniform(rng, -0.5, 0.5) * max_step;
            smat::at(s, n, i, j) = v;
            smat::at(s, n, j, i) = v;
        }
    const auto ep = smat::jacobi_eigen(p.data(), n);
    const auto sq = smat::compose(ep, n, [](double v) { return std::sqrt(v); });
    const auto es = smat::jacobi_eigen(s, n);
    const auto ex = smat::compose(es, n, [](double v) { return std::exp(v); });
    auto r = smat::multiply(smat::multiply(sq, ex, n), sq, n);
    smat::symmetrize(r, n);
    return ManifoldPoint::spd(n, r);
}

// Random admissible polyline with consecutive distances below max_step.
inline Polyline random_polyline(std::mt19937& rng, ManifoldFamily family, int n, double max_step,
                                Topology topology) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<ManifoldPoint> pts;
        switch (family) {
            case ManifoldFamily::euclidean: {
                std::vector<double> x = {uniform(rng, -2, 2), uniform(rng, -2, 2)};
                pts.push_back(ManifoldPoint::euclidean(x));
                for (int i = 1; i < n; ++i) {
                    x[0] += uniform(rng, -max_step, max_step);
                    x[1] += uniform(rng, -max_step, max_step);
                    pts.push_back(ManifoldPoint::euclidean(x));
                }
                break;
            }
            case ManifoldFamily::sphere: {
                pts.push_back(random_unit(rng, 3));
                for (int i = 1; i < n; ++i) pts.push_back(sphere_step(rng, pts.back(), max_step));
                break;
            }
            case ManifoldFamily::rotations3d: {
                pts.push_back(random_unit(rng, 4));
                for (int i = 1; i < n; ++i) pts.push_back(quat_step(rng, pts.back(), max_step));
                break;
            }
            case ManifoldFamily::spd: {
                pts.push_back(ManifoldPoint::spd(3, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
                for (int i = 1; i < n; ++i) pts.push_back(spd_step(rng, pts.back(), max_step));
                break;
            }
        }
        bool ok = true;
        const size_t pairs = topology == Topology::periodic ? pts.size() : pts.size() - 1;
        for (size_t i = 0; i < pairs && ok; ++i) {
            const ManifoldPoint& a = pts[i];
            const ManifoldPoint& b = pts[(i + 1) % pts.size()];
            if (!admissible(a, b) || distance(a, b) >= M_PI - 0.35) ok = false;
        }
        if (ok) return Polyline(std::move(pts), topology);
    }
    throw std::runtime_error("random_polyline failed to produce admissible data");
}

// Random factorization whose reconstructed mask stays well conditioned.
inline SymbolFactorization random_factorization(std::mt19937& rng, int max_m1, int max_m2, int max_degree) {
    while (true) {
        SymbolFactorization f;
        f.shift = uniform_int(rng, -2, 3);
        const int m1 = uniform_int(rng, 0, max_m1);
        int m2 = uniform_int(rng, 0, max_m2);
        while (1 + m1 + 2 * m2 > max_degree && m2 > 0) --m2;
        for (int i = 0; i < m1; ++i) {
            // all three ranges keep both averaging weights inside the window
            const double pick = uniform(rng, 0, 1);
            double a;
            if (pick < 0.7)
                a = uniform(rng, 0.25, 3.0);
            else if (pick < 0.85)
                a = uniform(rng, -0.45, -0.05);
            else
                a = uniform(rng, -3.0, -2.0);
            f.real_alphas.push_back(a);
        }
        for (int i = 0; i < m2; ++i)
            // Re >= -0.2 keeps the pyramid parameters of alpha and 1/alpha in
            // the extrapolation window for every modulus
            f.quadratic_alphas.emplace_back(uniform(rng, -0.2, 2.0), uniform(rng, 0.3, 1.5));
        if (1 + f.total_factor_degree() > max_degree) continue;

        // reject near-collisions of symbol roots: they are measure-zero but
        // blow up the root condition number far beyond any solver's reach
        std::vector<cdouble> roots;
        for (double a : f.real_alphas) roots.emplace_back(-1.0 / a, 0.0);
        for (const cdouble& a : f.quadratic_alphas) {
            roots.push_back(-1.0 / a);
            roots.push_back(std::conj(-1.0 / a));
        }
        bool separated = true;
        for (size_t i = 0; i < roots.size() && separated; ++i)
            for (size_t j = i + 1; j < roots.size() && separated; ++j)
                if (std::abs(roots[i] - roots[j]) < 0.05) separated = false;
        if (!separated) continue;

        if (validate(reconstruct(f)).ok) return f;
    }
}

// Certified factorization (mu < 1) with at least one quadratic factor and
// all round weights inside the extrapolation window.
inline SymbolFactorization random_certified_factorization(std::mt19937& rng) {
    while (true) {
        SymbolFactorization f;
        f.shift = uniform_int(rng, 0, 2);
        f.real_alphas.push_back(uniform(rng, 0.65, 1.6));
        if (uniform(rng, 0, 1) < 0.5) f.real_alphas.push_back(uniform(rng, 0.4, 2.2));
        if (uniform(rng, 0, 1) < 0.35) f.real_alphas.push_back(uniform(rng, -0.18, -0.04));
        const int quads = uniform(rng, 0, 1) < 0.3 ? 2 : 1;
        for (int i = 0; i < quads; ++i)
            f.quadratic_alphas.emplace_back(std::polar(uniform(rng, 0.4, 2.4), uniform(rng, 0.05, 1.0)));

        const ConvergenceReport report = contractivity(f);
        if (report.verdict != Verdict::certified_convergent || !report.mu || *report.mu > 0.97) continue;
        try {
            make_plan(f, Topology::periodic);
        } catch (const Error&) {
            continue;
        }
        return f;
    }
}

// Test-side polynomial product, independent of Mask/reconstruct internals.
inline std::vector<double> conv(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

}  // namespace testsupport
