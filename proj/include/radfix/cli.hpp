#pragma once

// The solve / certify / verify / sweep commands behind the radfix tool.

#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "radfix/certify.hpp"
#include "radfix/config.hpp"
#include "radfix/error.hpp"
#include "radfix/model.hpp"
#include "radfix/operator.hpp"
#include "radfix/oracle.hpp"
#include "radfix/report.hpp"
#include "radfix/solver.hpp"

namespace radfix::cli {

/// Stable process exit codes.
enum ExitCode : int {
    ok = 0,
    config_error = 1,
    not_converged = 2,
    uncertifiable_mass = 3,
    oracle_mismatch = 4,
    oracle_bracket_failure = 5,
};

namespace detail {

struct Failure {
    int code;
    std::string kind;
    std::string message;
};

/// Runs `body` and turns exceptions into error reports at the configured path.
inline int guarded(const RunConfig& cfg, Json& report, const std::function<int()>& body) {
    std::optional<Failure> failure;
    int code = ok;
    try {
        code = body();
    } catch (const ConfigError& e) {
        failure = Failure{config_error, "config", e.what()};
    } catch (const DomainError& e) {
        failure = Failure{config_error, "config", e.what()};
    } catch (const DivergenceError& e) {
        failure = Failure{not_converged, "divergence", e.what()};
    } catch (const BracketError& e) {
        failure = Failure{oracle_bracket_failure, "oracle_bracket", e.what()};
    } catch (const EvaluationError& e) {
        failure = Failure{not_converged, "evaluation", e.what()};
    }
    if (failure) {
        if (failure->code == config_error) {
            report = Json::object();
        }
        report["error"] = error_json(failure->code, failure->kind, failure->message);
        code = failure->code;
    }
    write_text(cfg.report_json, to_json_text(report));
    return code;
}

inline double central_density(const ProfilePair& p, const ProblemParams& params) { return density(p, params)[0]; }

}  // namespace detail

inline int cmd_solve(const RunConfig& cfg) {
    Json report = Json::object();
    return detail::guarded(cfg, report, [&] {
        validate_config(cfg, true);
        const ProblemParams params = params_from(cfg, *cfg.mass);
        const GridPtr grid = make_grid(cfg.grid_n, cfg.grid_gamma);
        report["command"] = "solve";
        report["params"] = params_json(params, *grid);
        report["certificate"] = certificate_json(certify(params));
        const SolveReport rep = picard_solve(params, grid, {cfg.solver_tol, cfg.solver_max_iter, std::nullopt});
        report["solve"] = solve_json(rep, detail::central_density(rep.profile, params));
        write_text(cfg.profile_csv, profile_csv(rep.profile, params));
        return rep.converged ? ok : not_converged;
    });
}

inline int cmd_certify(const RunConfig& cfg) {
    Json report = Json::object();
    return detail::guarded(cfg, report, [&] {
        validate_config(cfg, false);
        const NonlinearitySpec nl = nonlinearity_from(cfg);
        const double d = *cfg.dimension;
        report["command"] = "certify";
        if (!cfg.mass) {
            Json params{{"dimension", d}, {"mass", nullptr}, {"theta", ProblemParams::theta},
                        {"sigma_d", sphere_measure(d)},
                        {"nonlinearity", Json{{"kind", nl.kind_name()}, {"lipschitz", nl.lipschitz()}}}};
            report["params"] = params;
            Json cert = constants_json(constants(d, nl.lipschitz()));
            cert["m_max"] = max_mass(d, nl.lipschitz());
            report["certificate"] = cert;
            return static_cast<int>(ok);
        }
        const ProblemParams params(d, *cfg.mass, nl);
        const GridPtr grid = make_grid(cfg.grid_n, cfg.grid_gamma);
        report["params"] = params_json(params, *grid);
        const ContractionCertificate cert = certify(params);
        Json cert_json = certificate_json(cert);
        if (!cert.certified()) {
            report["certificate"] = cert_json;
            return static_cast<int>(uncertifiable_mass);
        }
        const EstimateReport est =
            empirical_estimates(params, grid, cert.chosen_rho, cfg.certify_trials, cfg.seed);
        cert_json["empirical"] = estimates_json(est, cert.chosen_rho, cfg.seed);
        report["certificate"] = cert_json;
        return static_cast<int>(ok);
    });
}

inline int cmd_verify(const RunConfig& cfg) {
    Json report = Json::object();
    return detail::guarded(cfg, report, [&] {
        validate_config(cfg, true);
        const ProblemParams params = params_from(cfg, *cfg.mass);
        const GridPtr grid = make_grid(cfg.grid_n, cfg.grid_gamma);
        report["command"] = "verify";
        report["params"] = params_json(params, *grid);
        report["certificate"] = certificate_json(certify(params));
        const SolveReport rep = picard_solve(params, grid, {cfg.solver_tol, cfg.solver_max_iter, std::nullopt});
        report["solve"] = solve_json(rep, detail::central_density(rep.profile, params));
        if (!rep.converged) {
            return static_cast<int>(not_converged);
        }
        ShootOptions shoot_opts;
        shoot_opts.tol = cfg.solver_tol;
        const ShootResult shot = shoot_solve(params, grid, shoot_opts);
        const ProfileComparison cmp = compare_profiles(rep.profile, shot.profile, params.d());
        Json verify = comparison_json(cmp);
        verify["tolerance"] = cfg.verify_tol;
        verify["picard_residual"] = rep.residual_sup;
        verify["oracle_residual"] = residual(shot.profile, params);
        verify["oracle_central_density"] = shot.central_density;
        verify["picard_central_density"] = detail::central_density(rep.profile, params);
        verify["oracle_shots"] = shot.shots;
        verify["agree"] = cmp.weighted_pair_diff <= cfg.verify_tol;
        report["verify"] = verify;
        return static_cast<int>(cmp.weighted_pair_diff <= cfg.verify_tol ? ok : oracle_mismatch);
    });
}

/// One row per mass, in input order. Masses above m_max run uncertified.
inline int cmd_sweep(const RunConfig& cfg, const std::vector<double>& masses) {
    Json report = Json::object();
    return detail::guarded(cfg, report, [&] {
        validate_config(cfg, false);
        if (masses.empty()) {
            throw ConfigError("--mass-list: at least one mass is required");
        }
        for (double m : masses) {
            if (!(m > 0.0) || !std::isfinite(m)) {
                throw ConfigError("--mass-list: masses must be finite and > 0");
            }
        }
        const NonlinearitySpec nl = nonlinearity_from(cfg);
        const GridPtr grid = make_grid(cfg.grid_n, cfg.grid_gamma);
        report["command"] = "sweep";
        std::vector<SweepRow> rows;
        Json sweep = Json::array();
        for (double m : masses) {
            const ProblemParams params(*cfg.dimension, m, nl);
            const ContractionCertificate cert = certify(params);
            SweepRow row{m, std::numeric_limits<double>::quiet_NaN(), 0, cert.certified(),
                         std::numeric_limits<double>::quiet_NaN()};
            Json entry{{"m", m}, {"certified", cert.certified()}};
            try {
                const SolveReport rep =
                    picard_solve(params, grid, {cfg.solver_tol, cfg.solver_max_iter, std::nullopt});
                row.iterations = rep.iterations;
                row.residual_sup = rep.residual_sup;
                if (rep.converged) {
                    row.central_density = detail::central_density(rep.profile, params);
                }
                entry["converged"] = rep.converged;
                entry["iterations"] = rep.iterations;
            } catch (const DivergenceError& e) {
                row.iterations = e.iteration();
                entry["converged"] = false;
                entry["error"] = e.what();
            } catch (const EvaluationError& e) {
                entry["converged"] = false;
                entry["error"] = e.what();
            }
            rows.push_back(row);
            sweep.push_back(entry);
        }
        report["params"] = Json{{"dimension", *cfg.dimension},
                                {"theta", ProblemParams::theta},
                                {"sigma_d", sphere_measure(*cfg.dimension)},
                                {"nonlinearity", Json{{"kind", nl.kind_name()}, {"lipschitz", nl.lipschitz()}}},
                                {"grid", Json{{"n", grid->intervals()}, {"gamma", grid->gamma()}}}};
        report["certificate"] = Json{{"m_max", max_mass(*cfg.dimension, nl.lipschitz())}};
        report["sweep"] = sweep;
        write_text(cfg.profile_csv, sweep_csv(rows));
        return static_cast<int>(ok);
    });
}

}  // namespace radfix::cli
