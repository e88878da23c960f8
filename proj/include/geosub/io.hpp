#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geosub/analysis.hpp"
#include "geosub/errors.hpp"
#include "geosub/geometry.hpp"
#include "geosub/pyramid.hpp"
#include "geosub/refine.hpp"
#include "geosub/symbol.hpp"

// JSON and CSV wire formats. Emission is hand-rolled so that identical inputs
// produce byte-identical output: keys are emitted in sorted order and every
// number is printed with 17 significant digits.

namespace geosub::io {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_array(const std::vector<double>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt17(v[i]);
    }
    return s + "]";
}

inline const char* kind_name(const ManifoldKind& kind) {
    switch (kind.family()) {
        case ManifoldFamily::euclidean: return "euclidean";
        case ManifoldFamily::sphere: return "sphere";
        case ManifoldFamily::rotations3d: return "so3";
        case ManifoldFamily::spd: return "spd";
    }
    return "?";
}

inline std::string emit_point(const ManifoldPoint& p) {
    return std::string("{\"data\":") + fmt_array(p.data()) + ",\"kind\":\"" + kind_name(p.kind()) + "\"}";
}

inline std::string emit_manifold(const ManifoldKind& kind) {
    return std::string("{\"dim\":") + std::to_string(kind.dim()) + ",\"kind\":\"" + kind_name(kind) + "\"}";
}

inline std::string emit_polyline(const Polyline& poly, std::optional<double> delta = std::nullopt) {
    std::string s = "{";
    if (delta) s += "\"delta\":" + fmt17(*delta) + ",";
    s += "\"manifold\":" + emit_manifold(poly.kind()) + ",\"points\":[";
    for (size_t i = 0; i < poly.size(); ++i) {
        if (i) s += ",";
        s += emit_point(poly[i]);
    }
    s += std::string("],\"topology\":\"") + (poly.topology() == Topology::periodic ? "periodic" : "open") + "\"}";
    return s;
}

inline std::string emit_mask(const Mask& mask) {
    return std::string("{\"coefficients\":") + fmt_array(mask.coefficients()) +
           ",\"first_index\":" + std::to_string(mask.first_index()) + "}";
}

inline std::string emit_complex(const cdouble& z) {
    return "{\"im\":" + fmt17(z.imag()) + ",\"re\":" + fmt17(z.real()) + "}";
}

inline std::string emit_factorization(const SymbolFactorization& f) {
    std::string s = "{\"quadratic_alphas\":[";
    for (size_t i = 0; i < f.quadratic_alphas.size(); ++i) {
        if (i) s += ",";
        s += emit_complex(f.quadratic_alphas[i]);
    }
    s += "],\"real_alphas\":" + fmt_array(f.real_alphas) + ",\"shift\":" + std::to_string(f.shift) + "}";
    return s;
}

inline std::string emit_params(const ThreePyramidParams& p) {
    return "{\"r\":" + fmt17(p.r) + ",\"t1\":" + fmt17(p.t1) + ",\"t2\":" + fmt17(p.t2) + ",\"w\":[" +
           fmt17(p.weights.w1) + "," + fmt17(p.weights.w2) + "," + fmt17(p.weights.w3) + "]}";
}

inline std::string emit_trace(const RefinementTrace& t) {
    std::string s = "{\"rounds\":[";
    for (size_t i = 0; i < t.rounds.size(); ++i) {
        const TraceRound& r = t.rounds[i];
        if (i) s += ",";
        s += "{\"alpha\":";
        if (!r.has_alpha)
            s += "null";
        else if (r.kind == TraceRound::Kind::quadratic)
            s += emit_complex(r.alpha);
        else
            s += fmt17(r.alpha.real());
        s += ",\"delta\":" + fmt17(r.delta) + ",\"kind\":\"";
        switch (r.kind) {
            case TraceRound::Kind::doubled: s += "double"; break;
            case TraceRound::Kind::linear: s += "linear"; break;
            case TraceRound::Kind::quadratic: s += "quadratic"; break;
        }
        s += "\"}";
    }
    return s + "],\"shift\":" + std::to_string(t.shift) + "}";
}

inline std::string emit_traces(const std::vector<RefinementTrace>& traces) {
    std::string s = "[";
    for (size_t i = 0; i < traces.size(); ++i) {
        if (i) s += ",";
        s += emit_trace(traces[i]);
    }
    return s + "]";
}

inline std::string emit_report(const ConvergenceReport& report, const SymbolFactorization& fac,
                               const Mask& mask_echo) {
    std::string s = "{\"displacement_K\":" + fmt17(report.displacement_K);
    s += ",\"factorization\":" + emit_factorization(fac);
    s += ",\"mask\":" + emit_mask(mask_echo);
    s += ",\"mu\":" + (report.mu ? fmt17(*report.mu) : "null");
    s += ",\"mu1\":" + (report.mu1 ? fmt17(*report.mu1) : "null");
    s += ",\"omega_verdicts\":[";
    for (size_t i = 0; i < report.omega_verdicts.size(); ++i) {
        if (i) s += ",";
        s += "{\"alpha\":" + emit_complex(report.omega_verdicts[i].first) + ",\"verdict\":\"" +
             to_string(report.omega_verdicts[i].second) + "\"}";
    }
    s += "],\"pyramid_params\":[";
    for (size_t i = 0; i < fac.quadratic_alphas.size(); ++i) {
        if (i) s += ",";
        s += emit_params(optimal_params(fac.quadratic_alphas[i]));
    }
    s += "],\"reason\":\"" + report.reason + "\"";
    s += std::string(",\"verdict\":\"") +
         (report.verdict == Verdict::certified_convergent ? "certified-convergent" : "not-certified") + "\"";
    s += ",\"xi_factors\":[";
    for (size_t i = 0; i < report.xi_factors.size(); ++i) {
        const XiFactor& x = report.xi_factors[i];
        if (i) s += ",";
        s += "{\"alpha\":";
        s += x.is_real ? fmt17(x.alpha.real()) : emit_complex(x.alpha);
        s += ",\"xi\":" + fmt17(x.value) + "}";
    }
    return s + "]}";
}

inline std::string emit_omega_csv(const std::vector<OmegaBoundarySample>& rows) {
    std::string s = "phi,rho1,rho2\n";
    for (const auto& r : rows) s += fmt17(r.phi) + "," + fmt17(r.rho1) + "," + fmt17(r.rho2) + "\n";
    return s;
}

// ---- parsing ----

using json = nlohmann::json;

inline ManifoldKind parse_manifold(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ValidationError("manifold object needs a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    const int dim = j.contains("dim") ? j.at("dim").get<int>() : 0;
    if (kind == "euclidean") return ManifoldKind::euclidean(dim);
    if (kind == "sphere") return ManifoldKind::sphere(dim);
    if (kind == "so3") return ManifoldKind::rotations3d();
    if (kind == "spd") return ManifoldKind::spd(dim);
    throw ValidationError("unknown manifold kind \"" + kind + "\"");
}

inline ManifoldPoint parse_point(const ManifoldKind& kind, const json& j) {
    if (!j.is_object() || !j.contains("data")) throw ValidationError("point object needs a \"data\" field");
    if (j.contains("kind") && j.at("kind").get<std::string>() != kind_name(kind))
        throw ValidationError("point kind does not match the polyline manifold");
    return {kind, j.at("data").get<std::vector<double>>()};
}

inline Polyline parse_polyline(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("polyline JSON parse failure: ") + e.what());
    }
    try {
        const ManifoldKind kind = parse_manifold(j.at("manifold"));
        const std::string topo = j.at("topology").get<std::string>();
        if (topo != "open" && topo != "periodic")
            throw ValidationError("topology must be \"open\" or \"periodic\"");
        std::vector<ManifoldPoint> points;
        for (const json& pj : j.at("points")) points.push_back(parse_point(kind, pj));
        return Polyline(std::move(points), topo == "periodic" ? Topology::periodic : Topology::open);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("polyline JSON is malformed: ") + e.what());
    }
}

inline Mask parse_mask_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        return Mask(j.at("coefficients").get<std::vector<double>>(), j.at("first_index").get<int>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("mask JSON is malformed: ") + e.what());
    }
}

inline SymbolFactorization parse_factorization_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        SymbolFactorization f;
        f.shift = j.at("shift").get<int>();
        if (j.contains("real_alphas")) f.real_alphas = j.at("real_alphas").get<std::vector<double>>();
        if (j.contains("quadratic_alphas"))
            for (const json& q : j.at("quadratic_alphas"))
                f.quadratic_alphas.emplace_back(q.at("re").get<double>(), q.at("im").get<double>());
        return f;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("factorization JSON is malformed: ") + e.what());
    }
}

// "c0,c1,...@L" with decimal or p/q entries; the offset defaults to 0.
inline Mask parse_mask_literal(const std::string& text) {
    std::string coeffs = text;
    int first_index = 0;
    if (const size_t at = text.find('@'); at != std::string::npos) {
        coeffs = text.substr(0, at);
        try {
            first_index = std::stoi(text.substr(at + 1));
        } catch (const std::exception&) {
            throw ValidationError("mask offset after '@' must be an integer");
        }
    }
    std::vector<double> values;
    size_t pos = 0;
    while (pos <= coeffs.size()) {
        const size_t comma = std::min(coeffs.find(',', pos), coeffs.size());
        const std::string tok = coeffs.substr(pos, comma - pos);
        if (tok.empty()) throw ValidationError("empty mask coefficient");
        try {
            if (const size_t slash = tok.find('/'); slash != std::string::npos)
                values.push_back(std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1)));
            else
                values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ValidationError("cannot parse mask coefficient \"" + tok + "\"");
        }
        if (comma == coeffs.size()) break;
        pos = comma + 1;
    }
    return Mask(std::move(values), first_index);
}

}  // namespace geosub::io
