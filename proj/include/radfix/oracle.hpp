#pragma once

// Independent solution of the radial boundary value problem
//   -Q'' + (d-1) Q'/r = R(Q' r^{1-d} / sigma_d) Q,  Q(0) = 0, Q(1) = m
// by shooting on the central density. Shares no code with the quadrature
// path in operator.hpp.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "radfix/error.hpp"
#include "radfix/model.hpp"

namespace radfix {

struct ShootResult {
    ProfilePair profile;
    double central_density;
    int shots;
    std::pair<double, double> bracket;
};

struct ShootOptions {
    double tol = 1e-12;
    double start_radius = 1e-6;
    /// Each grid interval is divided so that substeps never exceed this
    /// fraction of the interval's left radius.
    double max_relative_step = 0.01;
    int max_shots = 400;
};

namespace detail {

class Shooter {
public:
    Shooter(const ProblemParams& params, GridPtr grid, const ShootOptions& options)
        : params_(params), grid_(std::move(grid)), options_(options) {
        const auto nodes = grid_->nodes();
        first_ = static_cast<std::size_t>(
            std::upper_bound(nodes.begin(), nodes.end(), options_.start_radius) - nodes.begin());
        if (first_ >= nodes.size()) {
            throw DomainError("shoot_solve: start radius beyond the grid");
        }
        substeps_.resize(nodes.size(), 1);
        double left = options_.start_radius;
        for (std::size_t i = first_; i < nodes.size(); ++i) {
            const double h = nodes[i] - left;
            substeps_[i] = std::max(1, static_cast<int>(std::ceil(h / (options_.max_relative_step * left))));
            left = nodes[i];
        }
    }

    /// Integrates from the series seed for central density a; fills q, qp on
    /// the grid when requested. Returns Q(1).
    double shoot(double a, std::vector<double>* q = nullptr, std::vector<double>* qp = nullptr) const {
        const auto nodes = grid_->nodes();
        const double d = params_.d();
        const double sigma = params_.sigma_d();
        if (q) {
            q->assign(nodes.size(), 0.0);
            qp->assign(nodes.size(), 0.0);
            for (std::size_t i = 1; i < first_; ++i) {
                (*q)[i] = a * sigma * std::pow(nodes[i], d) / d;
                (*qp)[i] = a * sigma * std::pow(nodes[i], d - 1.0);
            }
        }
        double r = options_.start_radius;
        State y{a * sigma * std::pow(r, d) / d, a * sigma * std::pow(r, d - 1.0)};
        for (std::size_t i = first_; i < nodes.size(); ++i) {
            const double h = (nodes[i] - r) / substeps_[i];
            for (int k = 0; k < substeps_[i]; ++k) {
                y = rk4_step(r, y, h);
                r = (k + 1 == substeps_[i]) ? nodes[i] : r + h;
            }
            if (!std::isfinite(y[0]) || !std::isfinite(y[1])) {
                throw EvaluationError("shoot_solve: non-finite state at node " + std::to_string(i));
            }
            if (q) {
                (*q)[i] = y[0];
                (*qp)[i] = y[1];
            }
        }
        return y[0];
    }

    const GridPtr& grid() const noexcept { return grid_; }

private:
    using State = std::array<double, 2>;

    State rhs(double r, const State& y) const {
        const double d = params_.d();
        const double n = y[1] * std::pow(r, 1.0 - d) / params_.sigma_d();
        return {y[1], (d - 1.0) * y[1] / r - params_.nonlinearity()(n) * y[0]};
    }

    State rk4_step(double r, const State& y, double h) const {
        const State k1 = rhs(r, y);
        const State k2 = rhs(r + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
        const State k3 = rhs(r + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
        const State k4 = rhs(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
        return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
    }

    const ProblemParams& params_;
    GridPtr grid_;
    ShootOptions options_;
    std::size_t first_ = 1;
    std::vector<int> substeps_;
};

}  // namespace detail

/// Shooting from r0 = 1e-6 with seed Q = a sigma_d r0^d / d, Q' = a sigma_d r0^{d-1},
/// RK4 on the grid, bisection on a over [0, a_hi] (a_hi doubled until Q(1)
/// overshoots m) followed by secant polish until |Q(1) - m| <= tol max(1, m).
inline ShootResult shoot_solve(const ProblemParams& params, const GridPtr& grid, const ShootOptions& options = {}) {
    if (!(params.m() > 0.0)) {
        throw DomainError("shoot_solve: mass must be > 0");
    }
    if (!(options.tol > 0.0)) {
        throw DomainError("shoot_solve: tol must be > 0");
    }
    const detail::Shooter shooter(params, grid, options);
    const double m = params.m();
    const double target_tol = options.tol * std::max(1.0, m);
    int shots = 0;
    auto mismatch = [&](double a) {
        ++shots;
        return shooter.shoot(a) - m;
    };

    double lo = 0.0;
    double f_lo = -m;
    double hi = m * params.d() / params.sigma_d();
    double f_hi = mismatch(hi);
    std::string trace = "a=0 -> " + std::to_string(f_lo);
    while (f_hi < 0.0) {
        trace += "; a=" + std::to_string(hi) + " -> " + std::to_string(f_hi);
        if (!(f_hi > f_lo)) {
            throw BracketError("shoot_solve: Q(1) not increasing in the central density (" + trace + ")");
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        if (shots >= options.max_shots || !std::isfinite(hi)) {
            throw BracketError("shoot_solve: could not bracket the central density (" + trace + ")");
        }
        f_hi = mismatch(hi);
    }
    if (!std::isfinite(f_hi)) {
        throw BracketError("shoot_solve: non-finite Q(1) while bracketing (" + trace + ")");
    }

    // Bisection to a relative bracket width of 1e-6, then secant inside the bracket.
    double a = hi;
    double f_a = f_hi;
    while (std::abs(f_a) > target_tol && hi - lo > 1e-6 * hi && shots < options.max_shots) {
        a = 0.5 * (lo + hi);
        f_a = mismatch(a);
        if (f_a < 0.0) {
            lo = a;
            f_lo = f_a;
        } else {
            hi = a;
            f_hi = f_a;
        }
    }
    double prev = lo, f_prev = f_lo;
    if (std::abs(f_hi) < std::abs(f_lo)) {
        a = hi;
        f_a = f_hi;
    } else {
        a = lo;
        f_a = f_lo;
        prev = hi;
        f_prev = f_hi;
    }
    while (std::abs(f_a) > target_tol) {
        if (shots >= options.max_shots) {
            throw BracketError("shoot_solve: no convergence within " + std::to_string(options.max_shots) +
                               " shots, residual " + std::to_string(f_a));
        }
        double next = f_a != f_prev ? a - f_a * (a - prev) / (f_a - f_prev) : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double f_next = mismatch(next);
        if (f_next < 0.0) {
            lo = next;
        } else {
            hi = next;
        }
        prev = a;
        f_prev = f_a;
        a = next;
        f_a = f_next;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            break;
        }
    }

    std::vector<double> q, qp;
    shooter.shoot(a, &q, &qp);
    ++shots;
    return ShootResult{ProfilePair(grid, std::move(q), std::move(qp)), a, shots, {lo, hi}};
}

struct ProfileComparison {
    double sup_q_diff;
    double sup_qprime_diff;
    double weighted_pair_diff;
};

inline ProfileComparison compare_profiles(const ProfilePair& a, const ProfilePair& b, double d) {
    ProfilePair::require_same_grid(a, b);
    ProfileComparison out{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.sup_q_diff = std::max(out.sup_q_diff, std::abs(a.q()[i] - b.q()[i]));
        out.sup_qprime_diff = std::max(out.sup_qprime_diff, std::abs(a.qprime()[i] - b.qprime()[i]));
    }
    out.weighted_pair_diff = pair_norm(a - b, d);
    return out;
}

}  // namespace radfix
