#pragma once

// Flat `key = value` run configuration.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "radfix/error.hpp"
#include "radfix/model.hpp"

namespace radfix {

struct RunConfig {
    std::optional<double> dimension;
    std::optional<double> mass;
    std::string nonlinearity_kind = "identity";
    std::optional<double> nonlinearity_scale;
    std::optional<std::string> nonlinearity_table;
    std::optional<double> nonlinearity_lipschitz;
    std::size_t grid_n = 2048;
    double grid_gamma = 2.0;
    double solver_tol = 1e-12;
    int solver_max_iter = 200;
    std::string profile_csv = "profile.csv";
    std::string report_json = "report.json";
    std::uint64_t seed = 0;
    double verify_tol = 1e-4;
    std::size_t certify_trials = 100;
    /// Directory relative table paths are resolved against.
    std::filesystem::path base_dir = ".";
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_real(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        throw ConfigError(key + ": expected a real number, got '" + text + "'");
    }
    return v;
}

inline long long parse_integer(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    }
    return v;
}

}  // namespace detail

/// Parses the text form. Unknown keys, duplicates and malformed values are
/// collected and reported together, each with its key name. Range checks on
/// the numeric values happen in validate_config().
inline RunConfig parse_config(const std::string& text, std::vector<std::string>* problems = nullptr) {
    RunConfig cfg;
    std::vector<std::string> errors;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (seen[key]++ > 0) {
            errors.push_back(key + ": duplicate key");
            continue;
        }
        try {
            if (key == "dimension") {
                cfg.dimension = detail::parse_real(key, value);
            } else if (key == "mass") {
                if (!value.empty()) {
                    cfg.mass = detail::parse_real(key, value);
                }
            } else if (key == "nonlinearity.kind") {
                cfg.nonlinearity_kind = value;
            } else if (key == "nonlinearity.scale") {
                cfg.nonlinearity_scale = detail::parse_real(key, value);
            } else if (key == "nonlinearity.table") {
                cfg.nonlinearity_table = value;
            } else if (key == "nonlinearity.lipschitz") {
                cfg.nonlinearity_lipschitz = detail::parse_real(key, value);
            } else if (key == "grid.n") {
                const long long n = detail::parse_integer(key, value);
                if (n < 0) {
                    throw ConfigError(key + ": must be nonnegative");
                }
                cfg.grid_n = static_cast<std::size_t>(n);
            } else if (key == "grid.gamma") {
                cfg.grid_gamma = detail::parse_real(key, value);
            } else if (key == "solver.tol") {
                cfg.solver_tol = detail::parse_real(key, value);
            } else if (key == "solver.max_iter") {
                cfg.solver_max_iter = static_cast<int>(detail::parse_integer(key, value));
            } else if (key == "output.profile_csv") {
                cfg.profile_csv = value;
            } else if (key == "output.report_json") {
                cfg.report_json = value;
            } else if (key == "seed") {
                const long long s = detail::parse_integer(key, value);
                if (s < 0) {
                    throw ConfigError(key + ": must be nonnegative");
                }
                cfg.seed = static_cast<std::uint64_t>(s);
            } else if (key == "verify.tol") {
                cfg.verify_tol = detail::parse_real(key, value);
            } else if (key == "certify.trials") {
                const long long t = detail::parse_integer(key, value);
                if (t < 0) {
                    throw ConfigError(key + ": must be nonnegative");
                }
                cfg.certify_trials = static_cast<std::size_t>(t);
            } else {
                errors.push_back(key + ": unknown key");
            }
        } catch (const ConfigError& e) {
            errors.emplace_back(e.what());
        }
    }
    if (problems) {
        *problems = errors;
    } else if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) {
            msg += "\n  " + e;
        }
        throw ConfigError(msg);
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path, std::vector<std::string>* problems = nullptr) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse_config(buf.str(), problems);
    cfg.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return cfg;
}

/// Two-column `z,R` table; a non-numeric first line is taken as a header.
inline NonlinearitySpec load_table(const std::filesystem::path& path, double lipschitz) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("nonlinearity.table: cannot read " + path.string());
    }
    std::vector<double> z, values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("nonlinearity.table: expected 'z,R' rows in " + path.string());
        }
        const std::string zs = detail::trim(line.substr(0, comma));
        const std::string rs = detail::trim(line.substr(comma + 1));
        try {
            const double zv = detail::parse_real("nonlinearity.table", zs);
            const double rv = detail::parse_real("nonlinearity.table", rs);
            z.push_back(zv);
            values.push_back(rv);
        } catch (const ConfigError&) {
            if (!first) {
                throw;
            }
        }
        first = false;
    }
    try {
        return NonlinearitySpec::tabulated(std::move(z), std::move(values), lipschitz);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("nonlinearity.table: ") + e.what());
    }
}

/// Range checks against the module preconditions, reported with key names.
/// `mass_required` is false for certify and sweep.
inline void validate_config(const RunConfig& cfg, bool mass_required) {
    std::vector<std::string> errors;
    if (!cfg.dimension) {
        errors.push_back("dimension: required");
    } else if (!(*cfg.dimension > 2.0) || !std::isfinite(*cfg.dimension)) {
        errors.push_back("dimension: must be a finite real > 2");
    }
    if (!cfg.mass) {
        if (mass_required) {
            errors.push_back("mass: required");
        }
    } else if (!(*cfg.mass > 0.0) || !std::isfinite(*cfg.mass)) {
        errors.push_back("mass: must be a finite real > 0");
    }
    const std::string& kind = cfg.nonlinearity_kind;
    if (kind == "identity" || kind == "saturating") {
        if (cfg.nonlinearity_lipschitz && *cfg.nonlinearity_lipschitz != 1.0) {
            errors.push_back("nonlinearity.lipschitz: must be 1 for " + kind);
        }
        if (kind == "saturating" && (!cfg.nonlinearity_scale || !(*cfg.nonlinearity_scale > 0.0))) {
            errors.push_back("nonlinearity.scale: saturating requires a scale > 0");
        }
    } else if (kind == "tabulated") {
        if (!cfg.nonlinearity_table) {
            errors.push_back("nonlinearity.table: tabulated requires a table path");
        }
        if (!cfg.nonlinearity_lipschitz || !(*cfg.nonlinearity_lipschitz > 0.0)) {
            errors.push_back("nonlinearity.lipschitz: tabulated requires a value > 0");
        }
    } else {
        errors.push_back("nonlinearity.kind: expected identity, saturating or tabulated, got '" + kind + "'");
    }
    if (cfg.grid_n < RadialGrid::min_intervals) {
        errors.push_back("grid.n: must be >= 16");
    }
    if (!(cfg.grid_gamma >= 1.0) || !std::isfinite(cfg.grid_gamma)) {
        errors.push_back("grid.gamma: must be >= 1");
    }
    if (!(cfg.solver_tol > 0.0)) {
        errors.push_back("solver.tol: must be > 0");
    }
    if (cfg.solver_max_iter < 1) {
        errors.push_back("solver.max_iter: must be >= 1");
    }
    if (!(cfg.verify_tol >= 0.0)) {
        errors.push_back("verify.tol: must be >= 0");
    }
    if (cfg.certify_trials < 1) {
        errors.push_back("certify.trials: must be >= 1");
    }
    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) {
            msg += "\n  " + e;
        }
        throw ConfigError(msg);
    }
}

inline NonlinearitySpec nonlinearity_from(const RunConfig& cfg) {
    if (cfg.nonlinearity_kind == "identity") {
        return NonlinearitySpec::identity();
    }
    if (cfg.nonlinearity_kind == "saturating") {
        return NonlinearitySpec::saturating(*cfg.nonlinearity_scale);
    }
    std::filesystem::path table = *cfg.nonlinearity_table;
    if (table.is_relative()) {
        table = cfg.base_dir / table;
    }
    return load_table(table, *cfg.nonlinearity_lipschitz);
}

inline ProblemParams params_from(const RunConfig& cfg, double mass) {
    return ProblemParams(*cfg.dimension, mass, nonlinearity_from(cfg));
}

}  // namespace radfix
