#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "geosub/errors.hpp"
#include "geosub/smat.hpp"

// Geodesic metric spaces with closed-form distance and weighted geodesic
// average M_t, including the extrapolation weights needed by subdivision
// rounds. Supported spaces: R^d, the unit sphere S^{d-1}, the rotation group
// SO(3) as unit quaternions, and the SPD cone with the affine-invariant
// metric. All operations are pure; points and polylines are immutable values.

namespace geosub {

namespace tol {
inline constexpr double unit = 1e-12;       // sphere / quaternion unit norm
inline constexpr double sym = 1e-12;        // SPD symmetry
inline constexpr double pd = 1e-12;         // SPD eigenvalue floor
inline constexpr double anti = 1e-6;        // antipodal rejection margin
inline constexpr double small_angle = 1e-8; // slerp fallback threshold
inline constexpr double t_max = 1.0;        // extrapolation window [-t_max, 1+t_max]
}  // namespace tol

enum class ManifoldFamily { euclidean, sphere, rotations3d, spd };

class ManifoldKind {
public:
    static ManifoldKind euclidean(int dim) {
        if (dim < 1) throw ValidationError("euclidean dimension must be >= 1");
        return {ManifoldFamily::euclidean, dim};
    }
    static ManifoldKind sphere(int ambient_dim) {
        if (ambient_dim < 2) throw ValidationError("sphere ambient dimension must be >= 2");
        return {ManifoldFamily::sphere, ambient_dim};
    }
    static ManifoldKind rotations3d() { return {ManifoldFamily::rotations3d, 4}; }
    static ManifoldKind spd(int n) {
        if (n < 1) throw ValidationError("spd matrix side must be >= 1");
        return {ManifoldFamily::spd, n};
    }

    [[nodiscard]] ManifoldFamily family() const { return family_; }

    // Ambient dimension for euclidean/sphere, matrix side for spd, 4 for so3.
    [[nodiscard]] int dim() const { return family_ == ManifoldFamily::spd ? side_ : dim_; }
    [[nodiscard]] int side() const { return side_; }

    [[nodiscard]] size_t point_size() const {
        switch (family_) {
            case ManifoldFamily::euclidean:
            case ManifoldFamily::sphere: return static_cast<size_t>(dim_);
            case ManifoldFamily::rotations3d: return 4;
            case ManifoldFamily::spd: return static_cast<size_t>(side_) * side_;
        }
        return 0;
    }

    friend bool operator==(const ManifoldKind& a, const ManifoldKind& b) {
        return a.family_ == b.family_ && a.dim_ == b.dim_ && a.side_ == b.side_;
    }
    friend bool operator!=(const ManifoldKind& a, const ManifoldKind& b) { return !(a == b); }

private:
    ManifoldKind(ManifoldFamily f, int d) : family_(f) {
        if (f == ManifoldFamily::spd) {
            side_ = d;
            dim_ = d * d;
        } else {
            dim_ = d;
            side_ = 0;
        }
    }
    ManifoldFamily family_;
    int dim_;
    int side_;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// arccos(<a,b>) for unit vectors, evaluated as 2 atan2(|a-b|, |a+b|) which
// stays fully accurate near 0 and near pi where acos loses half the digits.
inline double unit_angle(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i], s = a[i] + b[i];
        diff += d * d;
        sum += s * s;
    }
    return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

}  // namespace detail

class ManifoldPoint {
public:
    ManifoldPoint(ManifoldKind kind, std::vector<double> data) : kind_(kind), data_(std::move(data)) {
        if (data_.size() != kind_.point_size())
            throw ValidationError("point data size does not match manifold kind");
        normalize();
    }

    static ManifoldPoint euclidean(std::vector<double> coords) {
        const int d = static_cast<int>(coords.size());
        return {ManifoldKind::euclidean(d), std::move(coords)};
    }
    static ManifoldPoint sphere(std::vector<double> coords) {
        const int d = static_cast<int>(coords.size());
        return {ManifoldKind::sphere(d), std::move(coords)};
    }
    static ManifoldPoint rotation(double w, double x, double y, double z) {
        return {ManifoldKind::rotations3d(), {w, x, y, z}};
    }
    static ManifoldPoint spd(int n, std::vector<double> row_major) {
        return {ManifoldKind::spd(n), std::move(row_major)};
    }

    [[nodiscard]] const ManifoldKind& kind() const { return kind_; }
    [[nodiscard]] const std::vector<double>& data() const { return data_; }

private:
    void normalize() {
        switch (kind_.family()) {
            case ManifoldFamily::euclidean: break;
            case ManifoldFamily::sphere:
            case ManifoldFamily::rotations3d: {
                const double n = detail::norm2(data_);
                if (std::abs(n - 1.0) > 10.0 * tol::unit)
                    throw ValidationError("coordinates are not unit length (|norm-1| = " +
                                          std::to_string(std::abs(n - 1.0)) + ")");
                // dividing by a norm already within a few ulps of 1 would only
                // churn the last bits and break serialization idempotence
                if (std::abs(n - 1.0) > 5e-16)
                    for (double& v : data_) v /= n;
                if (kind_.family() == ManifoldFamily::rotations3d) canonicalize_quaternion();
                break;
            }
            case ManifoldFamily::spd: {
                const int n = kind_.side();
                const double asym = smat::max_asymmetry(data_, n);
                if (asym > 10.0 * tol::sym)
                    throw ValidationError("spd matrix is not symmetric (asymmetry = " + std::to_string(asym) + ")");
                smat::symmetrize(data_, n);
                const auto eig = smat::jacobi_eigen(data_, n);
                for (double v : eig.values)
                    if (!(v > tol::pd)) throw ValidationError("matrix is not positive definite");
                break;
            }
        }
    }

    // q and -q denote the same rotation; pick the representative whose first
    // nonzero component is positive.
    void canonicalize_quaternion() {
        for (double v : data_) {
            if (v > 0.0) return;
            if (v < 0.0) {
                for (double& c : data_) c = -c;
                return;
            }
        }
    }

    ManifoldKind kind_;
    std::vector<double> data_;
};

namespace detail {

inline void require_same_kind(const ManifoldPoint& a, const ManifoldPoint& b) {
    if (a.kind() != b.kind()) throw ValidationError("manifold kind mismatch");
}

inline double spd_distance(const ManifoldPoint& a, const ManifoldPoint& b) {
    const int n = a.kind().side();
    const auto ea = smat::jacobi_eigen(a.data(), n);
    const auto isqrt = smat::compose(ea, n, [](double v) { return 1.0 / std::sqrt(v); });
    auto c = smat::multiply(smat::multiply(isqrt, b.data(), n), isqrt, n);
    smat::symmetrize(c, n);
    const auto ec = smat::jacobi_eigen(c, n);
    double s = 0.0;
    for (double v : ec.values) {
        if (!(v > 0.0)) throw NumericError("spd whitening produced a non-positive eigenvalue");
        const double lg = std::log(v);
        s += lg * lg;
    }
    return std::sqrt(s);
}

}  // namespace detail

// Geodesic distance. Euclidean: |a-b|; sphere: arc length; SO(3): rotation
// angle 2*acos|<qa,qb>|; SPD: ||log(A^{-1/2} B A^{-1/2})||_F.
inline double distance(const ManifoldPoint& a, const ManifoldPoint& b) {
    detail::require_same_kind(a, b);
    switch (a.kind().family()) {
        case ManifoldFamily::euclidean: {
            double s = 0.0;
            for (size_t i = 0; i < a.data().size(); ++i) {
                const double d = a.data()[i] - b.data()[i];
                s += d * d;
            }
            return std::sqrt(s);
        }
        case ManifoldFamily::sphere:
            return detail::unit_angle(a.data(), b.data());
        case ManifoldFamily::rotations3d: {
            // sign-align the double cover, then twice the quaternion angle
            if (detail::dot(a.data(), b.data()) >= 0.0) return 2.0 * detail::unit_angle(a.data(), b.data());
            std::vector<double> nb = b.data();
            for (double& v : nb) v = -v;
            return 2.0 * detail::unit_angle(a.data(), nb);
        }
        case ManifoldFamily::spd:
            return detail::spd_distance(a, b);
    }
    throw Error("unreachable");
}

// True iff a unique geodesic joins the pair and supports the extrapolation
// window. Euclidean and SPD are geodesically complete; sphere and SO(3)
// reject near-antipodal configurations.
inline bool admissible(const ManifoldPoint& a, const ManifoldPoint& b) {
    detail::require_same_kind(a, b);
    switch (a.kind().family()) {
        case ManifoldFamily::euclidean:
        case ManifoldFamily::spd: return true;
        case ManifoldFamily::sphere:
        case ManifoldFamily::rotations3d: return distance(a, b) < M_PI - tol::anti;
    }
    return false;
}

namespace detail {

inline void check_chart(double arc, double t) {
    // arc distances measured from either endpoint must stay below the
    // antipodal cutoff, otherwise the metric property breaks.
    if (std::abs(t) * arc >= M_PI - tol::anti || std::abs(1.0 - t) * arc >= M_PI - tol::anti)
        throw NumericError("geodesic extrapolation leaves the admissible chart at t = " + std::to_string(t));
}

inline std::vector<double> lerp(const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = (1.0 - t) * a[i] + t * b[i];
    return r;
}

inline std::vector<double> slerp(const std::vector<double>& a, const std::vector<double>& b, double theta, double t) {
    const double s = std::sin(theta);
    const double ca = std::sin((1.0 - t) * theta) / s;
    const double cb = std::sin(t * theta) / s;
    std::vector<double> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = ca * a[i] + cb * b[i];
    return r;
}

inline std::vector<double> normalized(std::vector<double> v) {
    const double n = norm2(v);
    if (n <= 0.0) throw NumericError("cannot normalize a zero vector");
    for (double& x : v) x /= n;
    return v;
}

}  // namespace detail

// Weighted geodesic average M_t(a, b) with M_0 = a and M_1 = b, satisfying
// the metric property d(M_t, b) = |1-t| d(a, b). Accepts extrapolation
// weights in [-t_max, 1+t_max].
inline ManifoldPoint geodesic_point(const ManifoldPoint& a, const ManifoldPoint& b, double t) {
    detail::require_same_kind(a, b);
    if (t < -tol::t_max - 1e-12 || t > 1.0 + tol::t_max + 1e-12)
        throw ValidationError("geodesic weight t = " + std::to_string(t) + " outside the extrapolation window");

    switch (a.kind().family()) {
        case ManifoldFamily::euclidean:
            return {a.kind(), detail::lerp(a.data(), b.data(), t)};
        case ManifoldFamily::sphere: {
            const double theta = distance(a, b);
            if (theta >= M_PI - tol::anti) throw NumericError("sphere pair is not admissible (near antipodal)");
            if (theta < tol::small_angle)
                return {a.kind(), detail::normalized(detail::lerp(a.data(), b.data(), t))};
            detail::check_chart(theta, t);
            return {a.kind(), detail::slerp(a.data(), b.data(), theta, t)};
        }
        case ManifoldFamily::rotations3d: {
            std::vector<double> qb = b.data();
            if (detail::dot(a.data(), qb) < 0.0)
                for (double& v : qb) v = -v;
            const double theta_q = detail::unit_angle(a.data(), qb);
            const double arc = 2.0 * theta_q;  // rotation-space distance
            if (arc >= M_PI - tol::anti) throw NumericError("rotation pair is not admissible (angle near pi)");
            if (theta_q < tol::small_angle)
                return {a.kind(), detail::normalized(detail::lerp(a.data(), qb, t))};
            detail::check_chart(arc, t);
            return {a.kind(), detail::slerp(a.data(), qb, theta_q, t)};
        }
        case ManifoldFamily::spd: {
            const int n = a.kind().side();
            const auto ea = smat::jacobi_eigen(a.data(), n);
            const auto sqrt_a = smat::compose(ea, n, [](double v) { return std::sqrt(v); });
            const auto isqrt_a = smat::compose(ea, n, [](double v) { return 1.0 / std::sqrt(v); });
            auto c = smat::multiply(smat::multiply(isqrt_a, b.data(), n), isqrt_a, n);
            smat::symmetrize(c, n);
            const auto ec = smat::jacobi_eigen(c, n);
            const auto ct = smat::compose(ec, n, [t](double v) {
                if (!(v > 0.0)) throw NumericError("spd whitening produced a non-positive eigenvalue");
                return std::pow(v, t);
            });
            auto r = smat::multiply(smat::multiply(sqrt_a, ct, n), sqrt_a, n);
            smat::symmetrize(r, n);
            return {a.kind(), std::move(r)};
        }
    }
    throw Error("unreachable");
}

enum class Topology { open, periodic };

// Finite sequence of points sharing one manifold kind. The user-facing
// constructor requires length >= 2 and admissible adjacent pairs (including
// the wrap-around pair in periodic mode); intermediate averaging rounds may
// carry shorter unchecked sequences.
class Polyline {
public:
    Polyline(std::vector<ManifoldPoint> points, Topology topology)
        : points_(std::move(points)), topology_(topology) {
        if (points_.size() < 2) throw ValidationError("polyline needs at least 2 points");
        check_kinds();
        const size_t pairs = topology_ == Topology::periodic ? points_.size() : points_.size() - 1;
        for (size_t i = 0; i < pairs; ++i)
            if (!admissible(points_[i], points_[(i + 1) % points_.size()]))
                throw ValidationError("polyline pair " + std::to_string(i) + " is not admissible");
    }

    static Polyline unchecked(std::vector<ManifoldPoint> points, Topology topology) {
        Polyline p;
        p.points_ = std::move(points);
        p.topology_ = topology;
        if (p.points_.empty()) throw ValidationError("polyline cannot be empty");
        p.check_kinds();
        return p;
    }

    [[nodiscard]] const std::vector<ManifoldPoint>& points() const { return points_; }
    [[nodiscard]] Topology topology() const { return topology_; }
    [[nodiscard]] size_t size() const { return points_.size(); }
    [[nodiscard]] const ManifoldPoint& operator[](size_t i) const { return points_[i]; }
    [[nodiscard]] const ManifoldKind& kind() const { return points_.front().kind(); }

private:
    Polyline() : topology_(Topology::open) {}
    void check_kinds() const {
        for (const auto& p : points_)
            if (p.kind() != points_.front().kind()) throw ValidationError("polyline points have mixed manifold kinds");
    }

    std::vector<ManifoldPoint> points_;
    Topology topology_;
};

// delta(p): the largest distance between adjacent points, wrap included in
// periodic mode.
inline double mesh_size(const Polyline& p) {
    if (p.size() < 2) return 0.0;
    const size_t pairs = p.topology() == Topology::periodic ? p.size() : p.size() - 1;
    double d = 0.0;
    for (size_t i = 0; i < pairs; ++i) d = std::max(d, distance(p[i], p[(i + 1) % p.size()]));
    return d;
}

// Piecewise geodesic interpolant sampled with `samples_per_segment` interior
// points per segment; original points are preserved.
inline Polyline sample_interpolant(const Polyline& p, int samples_per_segment) {
    if (samples_per_segment < 1) throw ValidationError("samples_per_segment must be positive");
    const size_t segs = p.topology() == Topology::periodic ? p.size() : p.size() - 1;
    std::vector<ManifoldPoint> out;
    out.reserve(p.size() + segs * static_cast<size_t>(samples_per_segment));
    for (size_t i = 0; i < segs; ++i) {
        out.push_back(p[i]);
        const ManifoldPoint& next = p[(i + 1) % p.size()];
        for (int k = 1; k <= samples_per_segment; ++k)
            out.push_back(geodesic_point(p[i], next, static_cast<double>(k) / (samples_per_segment + 1)));
    }
    if (p.topology() == Topology::open) out.push_back(p[p.size() - 1]);
    return Polyline(std::move(out), p.topology());
}

}  // namespace geosub
