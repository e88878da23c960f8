#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geosub/geosub.hpp"

// geosub: refine manifold-valued polylines with the geodesic-average global
// refinement scheme of a subdivision symbol, and certify symbol convergence.

namespace {

using namespace geosub;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file " + path);
    out << content << "\n";
}

struct SymbolSource {
    std::string mask_literal;
    std::string preset;
    std::string factorization_path;
};

struct ResolvedSymbol {
    SymbolFactorization factorization;
    Mask mask;
};

ResolvedSymbol resolve_symbol(const SymbolSource& src) {
    const int given = !src.mask_literal.empty() + !src.preset.empty() + !src.factorization_path.empty();
    if (given != 1)
        throw ValidationError("exactly one symbol source is required: --mask, --preset, or --factorization");

    if (!src.factorization_path.empty()) {
        SymbolFactorization f = io::parse_factorization_json(read_file(src.factorization_path));
        return {f, reconstruct(f)};
    }
    Mask mask = [&] {
        if (!src.preset.empty()) {
            const std::string tag = "bspline:";
            if (src.preset.rfind(tag, 0) != 0) throw ValidationError("unknown preset \"" + src.preset + "\"");
            int degree = 0;
            try {
                degree = std::stoi(src.preset.substr(tag.size()));
            } catch (const std::exception&) {
                throw ValidationError("preset degree must be an integer");
            }
            return bspline_mask(degree);
        }
        return io::parse_mask_literal(src.mask_literal);
    }();
    const MaskDiagnostic diag = validate(mask);
    if (!diag.ok) throw ValidationError("invalid mask: " + diag.message);
    return {factorize(mask), mask};
}

Topology parse_boundary(const std::string& s) {
    if (s == "periodic") return Topology::periodic;
    if (s == "open") return Topology::open;
    throw ValidationError("boundary must be \"periodic\" or \"open\"");
}

int cmd_refine(const std::string& input, const std::string& manifold, const SymbolSource& src, int steps,
               const std::string& boundary, const std::string& out, const std::string& trace_out) {
    Polyline data = io::parse_polyline(read_file(input));
    if (!manifold.empty() && manifold != io::kind_name(data.kind()))
        throw ValidationError("--manifold " + manifold + " conflicts with input kind " +
                              io::kind_name(data.kind()));
    if (!boundary.empty() && parse_boundary(boundary) != data.topology())
        throw ValidationError("--boundary conflicts with the input topology");
    if (steps < 0) throw ValidationError("--steps must be >= 0");

    const ResolvedSymbol symbol = resolve_symbol(src);
    const RefinementPlan plan = make_plan(symbol.factorization, data.topology());

    const SubdivisionResult result = subdivide(data, plan, steps);

    std::cout << "step delta\n";
    std::cout << "0 " << io::fmt17(mesh_size(data)) << "\n";
    for (size_t k = 0; k < result.traces.size(); ++k)
        std::cout << (k + 1) << " " << io::fmt17(result.traces[k].rounds.back().delta) << "\n";

    if (!out.empty()) write_file(out, io::emit_polyline(result.refined, mesh_size(result.refined)));
    if (!trace_out.empty()) write_file(trace_out, io::emit_traces(result.traces));
    return 0;
}

int cmd_analyze(const SymbolSource& src, const std::string& report_out) {
    const ResolvedSymbol symbol = resolve_symbol(src);
    const SymbolFactorization fac = order_factors(symbol.factorization).factorization;
    const ConvergenceReport report = contractivity(fac);

    std::cout << "shift: " << fac.shift << "\n";
    std::cout << "real alphas:";
    for (double a : fac.real_alphas) std::cout << " " << io::fmt17(a);
    std::cout << "\nquadratic alphas:";
    for (const cdouble& a : fac.quadratic_alphas)
        std::cout << " " << io::fmt17(a.real()) << (a.imag() >= 0 ? "+" : "") << io::fmt17(a.imag()) << "i";
    std::cout << "\nmu1: " << (report.mu1 ? io::fmt17(*report.mu1) : "none") << "\n";
    for (const XiFactor& x : report.xi_factors) {
        std::cout << "xi(" << io::fmt17(x.alpha.real());
        if (!x.is_real) std::cout << (x.alpha.imag() >= 0 ? "+" : "") << io::fmt17(x.alpha.imag()) << "i";
        std::cout << ") = " << io::fmt17(x.value) << "\n";
    }
    std::cout << "mu: " << (report.mu ? io::fmt17(*report.mu) : "none") << "\n";
    std::cout << "displacement K: " << io::fmt17(report.displacement_K) << "\n";
    for (const auto& [alpha, verdict] : report.omega_verdicts)
        std::cout << "omega(" << io::fmt17(alpha.real()) << (alpha.imag() >= 0 ? "+" : "")
                  << io::fmt17(alpha.imag()) << "i): " << to_string(verdict) << "\n";
    std::cout << "verdict: "
              << (report.verdict == Verdict::certified_convergent ? "certified-convergent" : "not-certified");
    if (!report.reason.empty()) std::cout << " (" << report.reason << ")";
    std::cout << "\n";

    if (!report_out.empty()) write_file(report_out, io::emit_report(report, fac, symbol.mask));
    return 0;
}

int cmd_omega(double mu1, int samples, const std::string& out) {
    const double up = upsilon(mu1);
    std::cout << "upsilon: " << io::fmt17(up) << "\n";
    const auto rows = omega_boundary(mu1, samples);
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw ValidationError("cannot open output file " + out);
        f << io::emit_omega_csv(rows);
    } else {
        std::cout << io::emit_omega_csv(rows);
    }
    return 0;
}

Polyline demo_dataset(const std::string& name) {
    if (name == "sphere-circle") {
        std::vector<ManifoldPoint> pts;
        for (int k = 0; k < 8; ++k) {
            const double t = 2.0 * M_PI * k / 8.0;
            pts.push_back(ManifoldPoint::sphere({std::cos(t), std::sin(t), 0.0}));
        }
        return Polyline(std::move(pts), Topology::periodic);
    }
    if (name == "so3-path") {
        std::vector<ManifoldPoint> pts;
        const double ax = 1.0 / std::sqrt(3.0);
        for (int k = 0; k < 6; ++k) {
            const double half = 0.25 * k;
            pts.push_back(ManifoldPoint::rotation(std::cos(half), std::sin(half) * ax, std::sin(half) * ax,
                                                  std::sin(half) * ax));
        }
        return Polyline(std::move(pts), Topology::open);
    }
    if (name == "spd-path") {
        std::vector<ManifoldPoint> pts;
        const double c = std::cos(0.3), s = std::sin(0.3);
        for (int k = 0; k < 5; ++k) {
            const double a = std::exp(0.4 * k), b = std::exp(0.2 * k), d = std::exp(-0.3 * k);
            // R diag(a,b,d) R^T with R the rotation by 0.3 about the z axis
            pts.push_back(ManifoldPoint::spd(3, {c * c * a + s * s * b, c * s * (b - a), 0.0,
                                                 c * s * (b - a), s * s * a + c * c * b, 0.0,
                                                 0.0, 0.0, d}));
        }
        return Polyline(std::move(pts), Topology::open);
    }
    if (name == "euclidean-square") {
        std::vector<ManifoldPoint> pts = {
            ManifoldPoint::euclidean({0.0, 0.0}), ManifoldPoint::euclidean({1.0, 0.0}),
            ManifoldPoint::euclidean({1.0, 1.0}), ManifoldPoint::euclidean({0.0, 1.0})};
        return Polyline(std::move(pts), Topology::periodic);
    }
    throw ValidationError("unknown demo dataset \"" + name +
                          "\"; available: sphere-circle, so3-path, spd-path, euclidean-square");
}

int cmd_demo(const std::string& name, const std::string& out) {
    const Polyline data = demo_dataset(name);
    const std::string text = io::emit_polyline(data);
    if (out.empty())
        std::cout << text << "\n";
    else
        write_file(out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"manifold-valued subdivision by geodesic-average global refinement"};
    app.require_subcommand(1);

    std::string input, manifold, boundary, out, trace_out, report_out, demo_name;
    SymbolSource src;
    int steps = 1;
    int samples = 64;
    double mu1 = 0.5;

    auto add_symbol_flags = [&src](CLI::App* cmd) {
        cmd->add_option("--mask", src.mask_literal, "mask coefficients \"c0,c1,...@L\" (fractions allowed)");
        cmd->add_option("--preset", src.preset, "named symbol preset, e.g. bspline:3");
        cmd->add_option("--factorization", src.factorization_path, "path to a factorization JSON file");
    };

    CLI::App* refine = app.add_subcommand("refine", "refine a polyline by repeated global refinement steps");
    refine->add_option("--input", input, "polyline JSON file")->required();
    refine->add_option("--manifold", manifold, "expected manifold kind (consistency check)");
    add_symbol_flags(refine);
    refine->add_option("--steps", steps, "number of refinement steps");
    refine->add_option("--boundary", boundary, "periodic|open (must match the input topology)");
    refine->add_option("--out", out, "refined polyline JSON output path");
    refine->add_option("--trace-out", trace_out, "per-round trace JSON output path");

    CLI::App* analyze = app.add_subcommand("analyze", "factor a symbol and certify convergence");
    add_symbol_flags(analyze);
    analyze->add_option("--report-out", report_out, "report JSON output path");

    CLI::App* omega = app.add_subcommand("omega", "emit the Omega convergence-domain boundary curves");
    omega->add_option("--mu1", mu1, "initial contractivity factor in [1/2, 1)")->required();
    omega->add_option("--samples", samples, "number of boundary samples");
    omega->add_option("--out", out, "CSV output path (stdout when omitted)");

    CLI::App* demo = app.add_subcommand("demo", "write a bundled admissible dataset");
    demo->add_option("name", demo_name, "sphere-circle | so3-path | spd-path | euclidean-square")->required();
    demo->add_option("--out", out, "polyline JSON output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "E: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(refine))
            return cmd_refine(input, manifold, src, steps, boundary, out, trace_out);
        if (app.got_subcommand(analyze)) return cmd_analyze(src, report_out);
        if (app.got_subcommand(omega)) return cmd_omega(mu1, samples, out);
        if (app.got_subcommand(demo)) return cmd_demo(demo_name, out);
    } catch (const ValidationError& e) {
        std::cerr << "E: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "E: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "E: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
