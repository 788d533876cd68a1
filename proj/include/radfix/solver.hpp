#pragma once

// Picard iteration of T, the ODE residual of Q, and the cone check on
// Q(r) r^{2-d}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "radfix/certify.hpp"
#include "radfix/error.hpp"
#include "radfix/model.hpp"
#include "radfix/operator.hpp"

namespace radfix {

/// max_{2<=i<=N-2} |-Q'' + (d-1) Q'/r - R(n) Q| / max(1, sup|Q|), with Q''
/// from 3-point nonuniform differences of the sampled Q'.
inline double residual(const ProfilePair& p, const ProblemParams& params) {
    const auto nodes = p.grid()->nodes();
    const auto q = p.q();
    const auto qp = p.qprime();
    const double d = params.d();
    const auto& R = params.nonlinearity();
    const std::vector<double> n = density(p, params);
    const std::size_t last = p.size() - 1;

    double q_sup = 0.0;
    for (double v : q) {
        q_sup = std::max(q_sup, std::abs(v));
    }
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 <= last; ++i) {
        const double hl = nodes[i] - nodes[i - 1];
        const double hr = nodes[i + 1] - nodes[i];
        const double qpp = -hr / (hl * (hl + hr)) * qp[i - 1] + (hr - hl) / (hl * hr) * qp[i] +
                           hl / (hr * (hl + hr)) * qp[i + 1];
        const double res = -qpp + (d - 1.0) * qp[i] / nodes[i] - R(n[i]) * q[i];
        if (!std::isfinite(res)) {
            throw EvaluationError("residual: non-finite value at node " + std::to_string(i));
        }
        worst = std::max(worst, std::abs(res));
    }
    return worst / std::max(1.0, q_sup);
}

struct ConeCheck {
    bool in_cone;
    double min_slope;
    /// ε_cone = 1e-10 max|g|.
    double tolerance;
};

/// g_i = Q_i r_i^{2-d} on interior nodes; min forward-difference slope of g.
inline ConeCheck cone_check(const ProfilePair& p, double d) {
    const auto nodes = p.grid()->nodes();
    const auto q = p.q();
    std::vector<double> g(q.size(), 0.0);
    double g_max = 0.0;
    for (std::size_t i = 1; i < q.size(); ++i) {
        g[i] = q[i] * std::pow(nodes[i], 2.0 - d);
        g_max = std::max(g_max, std::abs(g[i]));
    }
    double min_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < q.size(); ++i) {
        min_slope = std::min(min_slope, (g[i + 1] - g[i]) / (nodes[i + 1] - nodes[i]));
    }
    const double tolerance = 1e-10 * g_max;
    return {min_slope >= -tolerance, min_slope, tolerance};
}

struct SolveReport {
    ProfilePair profile;
    bool converged = false;
    int iterations = 0;
    double final_update = std::numeric_limits<double>::quiet_NaN();
    /// Geometric mean of successive update ratios; NaN with fewer than two nonzero updates.
    double empirical_rate = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> updates;
    double residual_sup = std::numeric_limits<double>::quiet_NaN();
    ConeCheck cone{};
    ContractionCertificate certificate;
    /// q * final_update / (1 - q); present on certified runs.
    std::optional<double> error_bound;
    double guard_radius = 0.0;
};

struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 200;
    std::optional<ProfilePair> initial;
};

/// Default initial iterate Q0 = m r^d, Q0' = m d r^{d-1}.
inline ProfilePair uniform_density_profile(const GridPtr& grid, const ProblemParams& params) {
    const double d = params.d();
    const double m = params.m();
    return ProfilePair::sample(
        grid, [&](double r) { return m * std::pow(r, d); },
        [&](double r) { return m * d * std::pow(r, d - 1.0); });
}

/// Plain Picard iteration p <- T p until ||T p - p|| <= tol or max_iter.
///
/// The guard radius is 10 rho with rho the certified radius, or, for an
/// uncertified mass, 10 max(||p_0||, ||T p_0||). Leaving it raises
/// DivergenceError; running out of iterations returns converged = false.
inline SolveReport picard_solve(const ProblemParams& params, const GridPtr& grid, const SolveOptions& options) {
    if (!(options.tol > 0.0)) {
        throw DomainError("picard_solve: tol must be > 0");
    }
    if (options.max_iter < 1) {
        throw DomainError("picard_solve: max_iter must be >= 1");
    }
    const double d = params.d();
    ContractionCertificate cert = params.m() > 0.0
                                      ? certify(params)
                                      : ContractionCertificate{constants(params), std::nullopt, max_mass(params)};
    ProfilePair current = options.initial ? *options.initial : uniform_density_profile(grid, params);
    if (current.grid() != grid && !current.grid()->same_nodes(*grid)) {
        throw DomainError("picard_solve: initial profile lives on a different grid");
    }

    SolveReport report{current, false, 0, std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(), {}, std::numeric_limits<double>::quiet_NaN(),
                       ConeCheck{}, cert, std::nullopt, 0.0};

    std::optional<double> guard;
    if (cert.certified()) {
        guard = 10.0 * cert.chosen_rho;
    }

    for (int k = 1; k <= options.max_iter; ++k) {
        ProfilePair next = apply_T(current, params);
        const double next_norm = pair_norm(next, d);
        if (!guard) {
            guard = 10.0 * std::max(pair_norm(current, d), next_norm);
        }
        if (!(next_norm <= *guard)) {
            throw DivergenceError("picard_solve: iterate norm " + std::to_string(next_norm) +
                                      " left the guard ball of radius " + std::to_string(*guard) +
                                      " at iteration " + std::to_string(k),
                                  k, next_norm);
        }
        const double update = pair_norm(next - current, d);
        report.updates.push_back(update);
        current = std::move(next);
        report.iterations = k;
        report.final_update = update;
        if (update <= options.tol) {
            report.converged = true;
            break;
        }
    }
    report.guard_radius = *guard;
    report.profile = current;

    double log_sum = 0.0;
    int ratios = 0;
    for (std::size_t k = 1; k < report.updates.size(); ++k) {
        if (report.updates[k - 1] > 0.0 && report.updates[k] > 0.0) {
            log_sum += std::log(report.updates[k] / report.updates[k - 1]);
            ++ratios;
        }
    }
    if (ratios > 0) {
        report.empirical_rate = std::exp(log_sum / ratios);
    }
    if (cert.certified()) {
        report.error_bound = cert.q_bound * report.final_update / (1.0 - cert.q_bound);
    }
    report.residual_sup = residual(current, params);
    report.cone = cone_check(current, d);
    return report;
}

}  // namespace radfix
