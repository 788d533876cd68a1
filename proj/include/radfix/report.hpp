#pragma once

// CSV and JSON emission. Every floating-point value is printed with 17
// significant digits; non-finite values become JSON null / CSV "nan".

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "radfix/certify.hpp"
#include "radfix/model.hpp"
#include "radfix/oracle.hpp"
#include "radfix/solver.hpp"

namespace radfix {

using Json = nlohmann::ordered_json;

inline std::string format_real(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void dump_json(const Json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ",\n";
                }
                first = false;
                out += inner + Json(it.key()).dump() + ": ";
                dump_json(it.value(), out, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first) {
                    out += ", ";
                }
                first = false;
                dump_json(v, out, indent + 1);
            }
            out += "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_real(v) : "null";
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

inline Json optional_real(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

}  // namespace detail

inline std::string to_json_text(const Json& j) {
    std::string out;
    detail::dump_json(j, out, 0);
    out += "\n";
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

inline Json params_json(const ProblemParams& params, const RadialGrid& grid) {
    Json nl;
    nl["kind"] = params.nonlinearity().kind_name();
    if (params.nonlinearity().kind() == NonlinearitySpec::Kind::saturating) {
        nl["scale"] = params.nonlinearity().scale();
    }
    nl["lipschitz"] = params.lipschitz();
    Json j;
    j["dimension"] = params.d();
    j["mass"] = params.m();
    j["theta"] = ProblemParams::theta;
    j["sigma_d"] = params.sigma_d();
    j["nonlinearity"] = nl;
    j["grid"] = Json{{"n", grid.intervals()}, {"gamma", grid.gamma()}};
    return j;
}

inline Json constants_json(const Constants& c) {
    return Json{{"A1", c.a1}, {"A2", c.a2}, {"A3", c.a3}, {"A4", c.a4}};
}

inline Json certificate_json(const ContractionCertificate& cert) {
    Json j = constants_json(cert.constants);
    j["m_max"] = cert.m_max;
    j["certified"] = cert.certified();
    j["rho_lo"] = cert.interval ? Json(cert.interval->lo) : Json(nullptr);
    j["rho_hi"] = cert.interval ? Json(cert.interval->hi) : Json(nullptr);
    j["chosen_rho"] = cert.certified() ? Json(cert.chosen_rho) : Json(nullptr);
    j["q_bound"] = cert.certified() ? Json(cert.q_bound) : Json(nullptr);
    return j;
}

inline Json estimates_json(const EstimateReport& est, double rho, std::uint64_t seed) {
    Json margins;
    for (int e = 0; e < 4; ++e) {
        margins[estimate_name(static_cast<Estimate>(e))] = est.min_margin[e];
    }
    Json violations = Json::array();
    for (const auto& v : est.violations) {
        violations.push_back(Json{{"trial", v.trial}, {"estimate", estimate_name(v.estimate)}, {"margin", v.margin}});
    }
    return Json{{"trials", est.trials},  {"seed", seed},
                {"rho", rho},            {"min_margin", margins},
                {"max_ratio", est.max_ratio}, {"violations", violations},
                {"estimates_hold", est.violations.empty()}};
}

inline Json solve_json(const SolveReport& rep, double central_density) {
    Json j;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["final_update"] = rep.final_update;
    j["empirical_rate"] = rep.empirical_rate;
    j["error_bound"] = detail::optional_real(rep.error_bound);
    j["residual_sup"] = rep.residual_sup;
    j["cone_min_slope"] = rep.cone.min_slope;
    j["in_cone"] = rep.cone.in_cone;
    j["central_density"] = central_density;
    j["boundary_mass"] = rep.profile.q().back();
    j["guard_radius"] = rep.guard_radius;
    j["updates"] = rep.updates;
    return j;
}

inline Json comparison_json(const ProfileComparison& c) {
    return Json{{"sup_q_diff", c.sup_q_diff},
                {"sup_qprime_diff", c.sup_qprime_diff},
                {"weighted_pair_diff", c.weighted_pair_diff}};
}

inline Json error_json(int code, const std::string& kind, const std::string& message) {
    return Json{{"code", code}, {"kind", kind}, {"message", message}};
}

/// `r,Q,Qprime,density,potential`, one row per node.
inline std::string profile_csv(const ProfilePair& p, const ProblemParams& params) {
    const std::vector<double> n = density(p, params);
    const std::vector<double> phi = potential(p, params);
    const auto nodes = p.grid()->nodes();
    std::string out = "r,Q,Qprime,density,potential\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        out += format_real(nodes[i]) + "," + format_real(p.q()[i]) + "," + format_real(p.qprime()[i]) + "," +
               format_real(n[i]) + "," + format_real(phi[i]) + "\n";
    }
    return out;
}

struct SweepRow {
    double m;
    double central_density;
    int iterations;
    bool certified;
    double residual_sup;
};

/// `m,central_density,iterations,certified,residual_sup`.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "m,central_density,iterations,certified,residual_sup\n";
    for (const auto& row : rows) {
        out += format_real(row.m) + "," + format_real(row.central_density) + "," +
               std::to_string(row.iterations) + "," + (row.certified ? "true" : "false") + "," +
               format_real(row.residual_sup) + "\n";
    }
    return out;
}

}  // namespace radfix
