#include <catch2/catch.hpp>

#include "support.hpp"

using namespace geosub;
using testsupport::point_gap;
using testsupport::random_polyline;

namespace {

Polyline reals(std::vector<double> xs, Topology topo) {
    std::vector<ManifoldPoint> pts;
    for (double x : xs) pts.push_back(ManifoldPoint::euclidean({x}));
    return Polyline::unchecked(std::move(pts), topo);
}

RefinementPlan plan_of(std::vector<double> alphas, int shift, Topology topo) {
    SymbolFactorization f;
    f.shift = shift;
    f.real_alphas = std::move(alphas);
    return make_plan(f, topo);
}

}  // namespace

TEST_CASE("elementary double") {
    const Polyline p = reals({0.0, 1.0}, Topology::open);
    const Polyline d = elementary_double(p);
    REQUIRE(d.size() == 4);
    CHECK(d[0].data()[0] == 0.0);
    CHECK(d[1].data()[0] == 0.0);
    CHECK(d[2].data()[0] == 1.0);
    CHECK(d[3].data()[0] == 1.0);
    CHECK(mesh_size(d) == Approx(mesh_size(p)));

    const Polyline per = elementary_double(reals({0, 1, 3}, Topology::periodic));
    CHECK(per.size() == 6);
    CHECK(per.topology() == Topology::periodic);
}

TEST_CASE("linear round") {
    const Polyline mid = linear_round(reals({0.0, 2.0}, Topology::open), 1.0);
    REQUIRE(mid.size() == 1);
    CHECK(mid[0].data()[0] == Approx(1.0));

    const Polyline w34 = linear_round(reals({0.0, 1.0, 3.0}, Topology::open), 3.0);
    REQUIRE(w34.size() == 2);
    CHECK(w34[0].data()[0] == Approx(0.75));
    CHECK(w34[1].data()[0] == Approx(2.5));

    const Polyline sph = linear_round(
        Polyline({ManifoldPoint::sphere({1, 0, 0}), ManifoldPoint::sphere({0, 1, 0})}, Topology::open), 1.0);
    REQUIRE(sph.size() == 1);
    CHECK(sph[0].data()[0] == Approx(1.0 / std::sqrt(2.0)));
    CHECK(sph[0].data()[1] == Approx(1.0 / std::sqrt(2.0)));

    const Polyline per = linear_round(reals({0.0, 1.0, 3.0}, Topology::periodic), 1.0);
    REQUIRE(per.size() == 3);
    CHECK(per[2].data()[0] == Approx(1.5));  // wrap pair (3, 0)

    CHECK_THROWS_AS(linear_round(reals({0, 1}, Topology::open), -1.0), ValidationError);
}

TEST_CASE("quadratic round") {
    const ThreePyramidParams params = optimal_params(cdouble(1.0, 0.5));
    const Polyline out = quadratic_round(reals({0.0, 1.0, 2.0}, Topology::open), params);
    REQUIRE(out.size() == 1);
    CHECK(out[0].data()[0] == Approx(1.05882).margin(1e-5));

    const Polyline flat = quadratic_round(reals({0.7, 0.7, 0.7, 0.7}, Topology::periodic), params);
    for (size_t i = 0; i < flat.size(); ++i) CHECK(flat[i].data()[0] == Approx(0.7).margin(1e-14));

    // alpha = i: output i is the midpoint of q_{i+2} and q_i
    const Polyline q = reals({0.0, 5.0, 1.0, -2.0}, Topology::periodic);
    const Polyline collapsed = quadratic_round(q, optimal_params(cdouble(0.0, 1.0)));
    REQUIRE(collapsed.size() == 4);
    for (size_t i = 0; i < 4; ++i)
        CHECK(collapsed[i].data()[0] == Approx(0.5 * (q[i].data()[0] + q[(i + 2) % 4].data()[0])));

    CHECK_THROWS_AS(quadratic_round(reals({0, 1, 2}, Topology::open), params_for_r(cdouble(1.0, 0.5), 1.5)),
                    ValidationError);
}

TEST_CASE("global refinement step: Chaikin on the periodic square") {
    std::vector<ManifoldPoint> corners = {
        ManifoldPoint::euclidean({0, 0}), ManifoldPoint::euclidean({1, 0}),
        ManifoldPoint::euclidean({1, 1}), ManifoldPoint::euclidean({0, 1})};
    const Polyline square(corners, Topology::periodic);
    const RefinementPlan plan = plan_of({1.0, 1.0}, 0, Topology::periodic);
    const Polyline out = global_refine_step(square, plan).refined;
    REQUIRE(out.size() == 8);

    // every output is a corner cut with weights (3/4, 1/4) of an adjacent pair
    for (size_t j = 0; j < out.size(); ++j) {
        bool matched = false;
        for (size_t i = 0; i < 4 && !matched; ++i)
            for (double w : {0.25, 0.75}) {
                const ManifoldPoint expect =
                    geodesic_point(square[i], square[(i + 1) % 4], w);
                if (point_gap(out[j], expect) < 1e-12) matched = true;
            }
        CHECK(matched);
    }

    // against the convolution oracle, coordinate by coordinate
    const Mask chaikin = bspline_mask(2);
    const int off = oracle_offset(plan);
    for (int coord = 0; coord < 2; ++coord) {
        std::vector<double> f;
        for (const auto& p : square.points()) f.push_back(p.data()[static_cast<size_t>(coord)]);
        const std::vector<double> lin = linear_refine(f, chaikin);
        for (size_t j = 0; j < out.size(); ++j)
            CHECK(out[j].data()[static_cast<size_t>(coord)] == Approx(lin[(j + off) % 8]).margin(1e-12));
    }
}

TEST_CASE("b-spline steps reduce to geodesic corner cuts on every manifold") {
    std::mt19937 rng(20);
    for (ManifoldFamily family : {ManifoldFamily::euclidean, ManifoldFamily::sphere, ManifoldFamily::rotations3d,
                                  ManifoldFamily::spd}) {
        const Polyline p = random_polyline(rng, family, 5, 0.6, Topology::periodic);
        const size_t n = p.size();

        // degree 1: midpoint insertion, original points kept
        const Polyline hat = global_refine_step(p, plan_of({1.0}, 0, Topology::periodic)).refined;
        for (size_t i = 0; i < n; ++i) {
            CHECK(point_gap(hat[2 * i], geodesic_point(p[(i + n - 1) % n], p[i], 0.5)) < 1e-12);
            CHECK(point_gap(hat[2 * i + 1], p[i]) < 1e-12);
        }

        // degree 2: the two corner cuts of every segment
        const Polyline chaikin = global_refine_step(p, plan_of({1.0, 1.0}, 0, Topology::periodic)).refined;
        for (size_t i = 0; i < n; ++i) {
            CHECK(point_gap(chaikin[2 * i], geodesic_point(p[(i + n - 1) % n], p[i], 0.75)) < 1e-12);
            CHECK(point_gap(chaikin[2 * i + 1], geodesic_point(p[i], p[(i + 1) % n], 0.25)) < 1e-12);
        }
    }
}

TEST_CASE("global refinement step: constant data stays constant") {
    std::mt19937 rng(21);
    const SymbolFactorization f = testsupport::random_certified_factorization(rng);
    const RefinementPlan plan = make_plan(f, Topology::periodic);
    const ManifoldPoint c = ManifoldPoint::sphere({0.6, 0.8, 0.0});
    const Polyline constant = Polyline::unchecked({c, c, c, c}, Topology::periodic);
    const Polyline out = global_refine_step(constant, plan).refined;
    for (size_t i = 0; i < out.size(); ++i) CHECK(point_gap(out[i], c) < 1e-12);
}

TEST_CASE("global refinement step keeps geodesic data on its geodesic") {
    std::mt19937 rng(22);
    for (ManifoldFamily family : {ManifoldFamily::sphere, ManifoldFamily::spd}) {
        const Polyline seed = random_polyline(rng, family, 2, 1.0, Topology::open);
        const ManifoldPoint a = seed[0], b = seed[1];
        std::vector<ManifoldPoint> pts;
        for (double t : {0.05, 0.3, 0.45, 0.8, 0.95}) pts.push_back(geodesic_point(a, b, t));
        const Polyline data(pts, Topology::periodic);

        const RefinementPlan plan = plan_of({1.0, 2.5, 0.8}, 1, Topology::periodic);
        const Polyline out = global_refine_step(data, plan).refined;
        const double dab = distance(a, b);
        for (size_t i = 0; i < out.size(); ++i) {
            const double t_hat = distance(a, out[i]) / dab;
            CHECK(point_gap(out[i], geodesic_point(a, b, t_hat)) < 1e-9);
        }
    }
}

TEST_CASE("subdivide") {
    std::vector<ManifoldPoint> corners = {
        ManifoldPoint::euclidean({0, 0}), ManifoldPoint::euclidean({1, 0}),
        ManifoldPoint::euclidean({1, 1}), ManifoldPoint::euclidean({0, 1})};
    const Polyline square(corners, Topology::periodic);
    const RefinementPlan plan = plan_of({1.0, 1.0}, 0, Topology::periodic);

    SECTION("k = 0 is the identity") {
        const SubdivisionResult r = subdivide(square, plan, 0);
        CHECK(r.refined.size() == 4);
        CHECK(r.traces.empty());
    }
    SECTION("six Chaikin steps contract the mesh by 2^-6") {
        const SubdivisionResult r = subdivide(square, plan, 6);
        CHECK(r.refined.size() == 4 * 64);
        CHECK(r.traces.size() == 6);
        CHECK(mesh_size(r.refined) <= std::pow(0.5, 6) * mesh_size(square) + 1e-12);
        for (const RefinementTrace& t : r.traces) {
            REQUIRE(t.rounds.size() == 3);
            CHECK(t.rounds[0].kind == TraceRound::Kind::doubled);
            CHECK(t.rounds[2].kind == TraceRound::Kind::linear);
            CHECK(t.shift == 0);
        }
    }
    SECTION("spd pair interpolation stays on the geodesic") {
        const ManifoldPoint a = ManifoldPoint::spd(3, {1, 0, 0, 0, 2, 0, 0, 0, 0.5});
        const ManifoldPoint b = ManifoldPoint::spd(3, {2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 1});
        std::vector<ManifoldPoint> pts;
        for (double t : {0.0, 0.25, 0.5, 0.75}) pts.push_back(geodesic_point(a, b, t));
        const Polyline data(pts, Topology::periodic);
        const SubdivisionResult r = subdivide(data, plan_of({1.0}, 1, Topology::periodic), 3);
        const double dab = distance(a, b);
        for (size_t i = 0; i < r.refined.size(); ++i) {
            const double t_hat = distance(a, r.refined[i]) / dab;
            CHECK(point_gap(r.refined[i], geodesic_point(a, b, t_hat)) < 1e-9);
        }
    }
    SECTION("open mode shrinks and eventually errors out") {
        const Polyline path = reals({0, 1, 2, 3}, Topology::open);
        const RefinementPlan open_plan = plan_of({1.0, 1.0}, 0, Topology::open);
        const SubdivisionResult one = subdivide(path, open_plan, 1);
        CHECK(one.refined.size() == 2 * 4 - 2);
        CHECK_THROWS_AS(subdivide(reals({0, 1}, Topology::open), make_plan(factorize(bspline_mask(4)),
                                                                           Topology::open), 1),
                        NumericError);
    }
}

TEST_CASE("global equals the convolution oracle under the shift correspondence") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const SymbolFactorization f = testsupport::random_factorization(rng, 4, 2, 10);
        RefinementPlan plan;
        try {
            plan = make_plan(f, Topology::periodic);
        } catch (const ValidationError&) {
            continue;  // weights outside the extrapolation window
        }
        const Mask mask = reconstruct(f);
        const int n = testsupport::uniform_int(rng, 4, 16);
        std::vector<double> data(static_cast<size_t>(n));
        for (double& v : data) v = testsupport::uniform(rng, -2, 2);

        const Polyline out = global_refine_step(reals(data, Topology::periodic), plan).refined;
        const std::vector<double> lin = linear_refine(data, mask);
        const long len = 2 * n, off = oracle_offset(plan);
        for (long j = 0; j < len; ++j)
            CHECK(out[static_cast<size_t>(j)].data()[0] ==
                  Approx(lin[static_cast<size_t>(((j + off) % len + len) % len)]).margin(1e-10));
    }
}

TEST_CASE("local refinement matches the global step") {
    std::mt19937 rng(24);
    SECTION("b-spline plans on sphere data") {
        const Polyline data = random_polyline(rng, ManifoldFamily::sphere, 7, 0.6, Topology::periodic);
        for (int degree : {2, 3}) {
            const RefinementPlan plan = make_plan(factorize(bspline_mask(degree)), Topology::periodic);
            const Polyline g = global_refine_step(data, plan).refined;
            const Polyline l = local_refine_step(data, plan);
            REQUIRE(g.size() == l.size());
            for (size_t i = 0; i < g.size(); ++i) CHECK(point_gap(g[i], l[i]) < 1e-9);
        }
    }
    SECTION("asymmetric factors and nonzero shift") {
        const Polyline data = random_polyline(rng, ManifoldFamily::rotations3d, 5, 0.5, Topology::periodic);
        const RefinementPlan plan = plan_of({0.8, 2.2, 1.7}, 2, Topology::periodic);
        const Polyline g = global_refine_step(data, plan).refined;
        const Polyline l = local_refine_step(data, plan);
        REQUIRE(g.size() == l.size());
        for (size_t i = 0; i < g.size(); ++i) CHECK(point_gap(g[i], l[i]) < 1e-9);
    }
    SECTION("single factor plans reduce to one round either way") {
        const Polyline data = random_polyline(rng, ManifoldFamily::euclidean, 5, 0.8, Topology::periodic);
        const RefinementPlan plan = plan_of({1.0}, 1, Topology::periodic);
        const Polyline g = global_refine_step(data, plan).refined;
        const Polyline l = local_refine_step(data, plan);
        for (size_t i = 0; i < g.size(); ++i) CHECK(point_gap(g[i], l[i]) < 1e-12);
    }
    SECTION("quadratic factors are unsupported") {
        SymbolFactorization f;
        f.real_alphas = {1.0};
        f.quadratic_alphas = {cdouble(1.0, 0.5)};
        const RefinementPlan plan = make_plan(f, Topology::periodic);
        const Polyline data = reals({0, 1, 2, 3}, Topology::periodic);
        CHECK_THROWS_AS(local_refine_step(data, plan), ValidationError);
    }
}

TEST_CASE("linear refine") {
    SECTION("hat mask performs linear interpolation refinement") {
        const std::vector<double> out = linear_refine({0.0, 1.0}, Mask({0.5, 1.0, 0.5}, -1));
        REQUIRE(out.size() == 4);
        CHECK(out[0] == Approx(0.0));
        CHECK(out[1] == Approx(0.5));
        CHECK(out[2] == Approx(1.0));
        CHECK(out[3] == Approx(0.5));
    }
    SECTION("output sum doubles the input sum when a(1) = 2") {
        std::mt19937 rng(25);
        for (int trial = 0; trial < 20; ++trial) {
            const Mask mask = reconstruct(testsupport::random_factorization(rng, 4, 1, 8));
            std::vector<double> f(static_cast<size_t>(testsupport::uniform_int(rng, 3, 9)));
            double sum = 0;
            for (double& v : f) {
                v = testsupport::uniform(rng, -1, 1);
                sum += v;
            }
            const std::vector<double> out = linear_refine(f, mask);
            double out_sum = 0;
            for (double v : out) out_sum += v;
            CHECK(out_sum == Approx(2.0 * sum).margin(1e-9));
        }
    }
    SECTION("Chaikin corner cuts on a step sequence") {
        const std::vector<double> out = linear_refine({0.0, 0.0, 1.0, 1.0}, bspline_mask(2));
        const std::vector<double> expect = {0.75, 0.25, 0.0, 0.0, 0.25, 0.75, 1.0, 1.0};
        REQUIRE(out.size() == expect.size());
        for (size_t i = 0; i < out.size(); ++i) CHECK(out[i] == Approx(expect[i]).margin(1e-14));
    }
}

TEST_CASE("contractivity of all-positive plans on every manifold") {
    std::mt19937 rng(26);
    for (ManifoldFamily family : {ManifoldFamily::sphere, ManifoldFamily::rotations3d, ManifoldFamily::spd}) {
        for (int degree : {1, 3}) {
            const SymbolFactorization f = factorize(bspline_mask(degree));
            const RefinementPlan plan = make_plan(f, Topology::periodic);
            const Polyline data = random_polyline(rng, family, 5, 0.6, Topology::periodic);
            Polyline cur = data;
            for (int k = 0; k < 3; ++k) {
                const double before = mesh_size(cur);
                cur = global_refine_step(cur, plan).refined;
                CHECK(mesh_size(cur) <= 0.5 * before + 1e-9);
            }
        }
    }
}

TEST_CASE("round deltas never exceed the first-round bound for positive factors") {
    std::mt19937 rng(27);
    const Polyline data = random_polyline(rng, ManifoldFamily::sphere, 6, 0.6, Topology::periodic);
    const RefinementPlan plan = plan_of({0.7, 1.0, 1.9, 1.2}, 1, Topology::periodic);
    const double mu1 = factor_mu(1.0);
    const GlobalStepResult step = global_refine_step(data, plan);
    const double d0 = mesh_size(data);
    for (size_t r = 1; r < step.trace.rounds.size(); ++r)
        CHECK(step.trace.rounds[r].delta <= mu1 * d0 + 1e-9);
}

TEST_CASE("mixed sign certified plans contract at rate mu") {
    std::mt19937 rng(28);
    SymbolFactorization f;
    f.shift = 1;
    f.real_alphas = {1.0, -0.1};
    const ConvergenceReport report = contractivity(f);
    REQUIRE(report.verdict == Verdict::certified_convergent);
    const RefinementPlan plan = make_plan(f, Topology::periodic);
    for (ManifoldFamily family : {ManifoldFamily::sphere, ManifoldFamily::spd}) {
        const Polyline data = random_polyline(rng, family, 5, 0.5, Topology::periodic);
        const auto ratios = empirical_contraction(data, plan, 3);
        for (const auto& r : ratios) {
            REQUIRE_FALSE(r.degenerate);
            CHECK(r.ratio <= *report.mu + 1e-9);
        }
    }
}

TEST_CASE("displacement of even points stays within the certified constant") {
    std::mt19937 rng(29);
    for (int degree : {2, 4}) {
        const SymbolFactorization f = factorize(bspline_mask(degree));
        const ConvergenceReport report = contractivity(f);
        const RefinementPlan plan = make_plan(f, Topology::periodic);
        const Polyline data = random_polyline(rng, ManifoldFamily::rotations3d, 5, 0.5, Topology::periodic);
        const Polyline out = global_refine_step(data, plan).refined;
        const double delta = mesh_size(data);
        for (size_t i = 0; i < data.size(); ++i)
            CHECK(distance(out[2 * i], data[i]) <= report.displacement_K * delta + 1e-9);
    }
}

TEST_CASE("plans with weights outside the extrapolation window are rejected") {
    SymbolFactorization f;
    f.real_alphas = {-1.5};  // weight 1/(1+alpha) = -2
    CHECK_THROWS_AS(make_plan(f, Topology::periodic), ValidationError);
}

TEST_CASE("topology mismatch between plan and data is rejected") {
    const RefinementPlan plan = plan_of({1.0}, 0, Topology::open);
    CHECK_THROWS_AS(global_refine_step(reals({0, 1, 2}, Topology::periodic), plan), ValidationError);
}
