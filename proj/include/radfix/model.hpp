#pragma once

// Problem parameters, radial grids, sampled profiles and the weighted sup
// norms of the space C^1_d.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radfix/error.hpp"

namespace radfix {

/// Surface measure of the unit sphere in R^d, 2 pi^{d/2} / Gamma(d/2).
inline double sphere_measure(double d) {
    if (!(d > 2.0) || !std::isfinite(d)) {
        throw DomainError("sphere_measure: dimension must be a finite real > 2, got " +
                          std::to_string(d));
    }
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// The nonlinearity R linking the pressure law to the radial equation,
/// together with its declared global Lipschitz constant.
///
/// R is defined on z >= 0 and extended oddly, R(z) = -R(-z), so that
/// intermediate iterates with negative density stay well defined.
class NonlinearitySpec {
public:
    enum class Kind { identity, saturating, tabulated };

    static NonlinearitySpec identity() { return NonlinearitySpec(Kind::identity, 1.0, 0.0, {}, {}); }

    /// R(z) = z / (1 + z/scale); Lipschitz constant 1.
    static NonlinearitySpec saturating(double scale) {
        if (!(scale > 0.0) || !std::isfinite(scale)) {
            throw DomainError("saturating nonlinearity: scale must be finite and > 0");
        }
        return NonlinearitySpec(Kind::saturating, 1.0, scale, {}, {});
    }

    /// Piecewise linear interpolation through (z_k, R_k), z_0 = 0, z strictly
    /// increasing, held constant beyond the last sample.
    static NonlinearitySpec tabulated(std::vector<double> z, std::vector<double> values,
                                      double lipschitz) {
        if (z.size() < 2 || z.size() != values.size()) {
            throw DomainError("tabulated nonlinearity: need >= 2 samples with matching lengths");
        }
        if (z.front() != 0.0) {
            throw DomainError("tabulated nonlinearity: first abscissa must be 0");
        }
        if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
            throw DomainError("tabulated nonlinearity: lipschitz constant must be finite and > 0");
        }
        double max_slope = 0.0;
        for (std::size_t k = 0; k + 1 < z.size(); ++k) {
            if (!(z[k + 1] > z[k]) || !std::isfinite(values[k]) || !std::isfinite(values[k + 1])) {
                throw DomainError("tabulated nonlinearity: abscissae must be strictly increasing "
                                  "and values finite");
            }
            max_slope = std::max(max_slope, std::abs((values[k + 1] - values[k]) / (z[k + 1] - z[k])));
        }
        if (max_slope > lipschitz) {
            throw DomainError("tabulated nonlinearity: declared lipschitz " + std::to_string(lipschitz) +
                              " is below the table's max slope " + std::to_string(max_slope));
        }
        NonlinearitySpec spec(Kind::tabulated, lipschitz, 0.0, std::move(z), std::move(values));
        if (spec(0.0) != 0.0) {
            throw DomainError("tabulated nonlinearity: R(0) must be 0");
        }
        return spec;
    }

    double operator()(double z) const {
        if (z < 0.0) {
            return -evaluate_nonnegative(-z);
        }
        return evaluate_nonnegative(z);
    }

    Kind kind() const noexcept { return kind_; }
    double lipschitz() const noexcept { return lipschitz_; }
    double scale() const noexcept { return scale_; }
    std::span<const double> table_z() const noexcept { return table_z_; }
    std::span<const double> table_values() const noexcept { return table_values_; }

    std::string kind_name() const {
        switch (kind_) {
            case Kind::identity: return "identity";
            case Kind::saturating: return "saturating";
            case Kind::tabulated: return "tabulated";
        }
        return "unknown";
    }

private:
    NonlinearitySpec(Kind kind, double lipschitz, double scale, std::vector<double> z,
                     std::vector<double> values)
        : kind_(kind), lipschitz_(lipschitz), scale_(scale), table_z_(std::move(z)),
          table_values_(std::move(values)) {}

    double evaluate_nonnegative(double z) const {
        switch (kind_) {
            case Kind::identity:
                return z;
            case Kind::saturating:
                return z / (1.0 + z / scale_);
            case Kind::tabulated: {
                if (z >= table_z_.back()) {
                    return table_values_.back();
                }
                auto it = std::upper_bound(table_z_.begin(), table_z_.end(), z);
                const auto k = static_cast<std::size_t>(it - table_z_.begin()) - 1;
                const double t = (z - table_z_[k]) / (table_z_[k + 1] - table_z_[k]);
                return table_values_[k] + t * (table_values_[k + 1] - table_values_[k]);
            }
        }
        return 0.0;
    }

    Kind kind_;
    double lipschitz_;
    double scale_;
    std::vector<double> table_z_;
    std::vector<double> table_values_;
};

class ProblemParams {
public:
    /// Temperature; fixed at 1 throughout.
    static constexpr double theta = 1.0;

    ProblemParams(double d, double m, NonlinearitySpec nonlinearity)
        : ProblemParams(d, m, std::move(nonlinearity), false) {}

    /// Same as the constructor but accepts m = 0, a degenerate case whose
    /// fixed point is Q = 0. Used by tests.
    static ProblemParams allow_zero_mass(double d, double m, NonlinearitySpec nonlinearity) {
        return ProblemParams(d, m, std::move(nonlinearity), true);
    }

    double d() const noexcept { return d_; }
    double m() const noexcept { return m_; }
    double sigma_d() const noexcept { return sigma_d_; }
    double lipschitz() const noexcept { return nonlinearity_.lipschitz(); }
    const NonlinearitySpec& nonlinearity() const noexcept { return nonlinearity_; }

    ProblemParams with_mass(double m) const { return ProblemParams(d_, m, nonlinearity_); }

private:
    ProblemParams(double d, double m, NonlinearitySpec nonlinearity, bool zero_mass_ok)
        : d_(d), m_(m), sigma_d_(sphere_measure(d)), nonlinearity_(std::move(nonlinearity)) {
        const bool mass_ok = zero_mass_ok ? m >= 0.0 : m > 0.0;
        if (!mass_ok || !std::isfinite(m)) {
            throw DomainError("mass must be finite and > 0, got " + std::to_string(m));
        }
    }

    double d_;
    double m_;
    double sigma_d_;
    NonlinearitySpec nonlinearity_;
};

/// Graded mesh r_i = (i/N)^gamma on [0,1] with composite trapezoid weights.
class RadialGrid {
public:
    static constexpr std::size_t min_intervals = 16;

    RadialGrid(std::size_t n, double gamma) : gamma_(gamma) {
        if (n < min_intervals) {
            throw DomainError("make_grid: N must be >= 16, got " + std::to_string(n));
        }
        if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
            throw DomainError("make_grid: gamma must be >= 1, got " + std::to_string(gamma));
        }
        nodes_.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            nodes_[i] = std::pow(static_cast<double>(i) / static_cast<double>(n), gamma);
        }
        nodes_.front() = 0.0;
        nodes_.back() = 1.0;

        steps_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            steps_[i] = nodes_[i + 1] - nodes_[i];
            if (!(steps_[i] > 0.0)) {
                throw DomainError("make_grid: nodes not strictly increasing (N too large for gamma)");
            }
        }
        weights_.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            weights_[i] += 0.5 * steps_[i];
            weights_[i + 1] += 0.5 * steps_[i];
        }
    }

    std::size_t intervals() const noexcept { return steps_.size(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    double gamma() const noexcept { return gamma_; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    /// steps()[i] = r_{i+1} - r_i.
    std::span<const double> steps() const noexcept { return steps_; }
    double node(std::size_t i) const { return nodes_[i]; }

    bool same_nodes(const RadialGrid& other) const noexcept { return nodes_ == other.nodes_; }

private:
    double gamma_;
    std::vector<double> nodes_;
    std::vector<double> steps_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(std::size_t n, double gamma = 2.0) {
    return std::make_shared<const RadialGrid>(n, gamma);
}

/// Sampled (Q, Q') on a grid: the state iterated by the fixed-point operator.
class ProfilePair {
public:
    ProfilePair(GridPtr grid, std::vector<double> q, std::vector<double> qprime)
        : grid_(std::move(grid)), q_(std::move(q)), qprime_(std::move(qprime)) {
        if (!grid_) {
            throw DomainError("ProfilePair: null grid");
        }
        if (q_.size() != grid_->size() || qprime_.size() != grid_->size()) {
            throw DomainError("ProfilePair: sample count must be N+1");
        }
        if (q_.front() != 0.0) {
            throw DomainError("ProfilePair: Q(0) must be 0");
        }
    }

    static ProfilePair zero(GridPtr grid) {
        const std::size_t n = grid->size();
        return ProfilePair(std::move(grid), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
    }

    /// Samples value and derivative callables at the grid nodes; Q(0) is pinned to 0.
    template <typename Value, typename Derivative>
    static ProfilePair sample(GridPtr grid, Value&& value, Derivative&& derivative) {
        std::vector<double> q(grid->size()), qp(grid->size());
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double r = grid->node(i);
            q[i] = value(r);
            qp[i] = derivative(r);
        }
        q[0] = 0.0;
        return ProfilePair(std::move(grid), std::move(q), std::move(qp));
    }

    const GridPtr& grid() const noexcept { return grid_; }
    std::span<const double> q() const noexcept { return q_; }
    std::span<const double> qprime() const noexcept { return qprime_; }
    std::size_t size() const noexcept { return q_.size(); }

    friend ProfilePair operator-(const ProfilePair& a, const ProfilePair& b) {
        require_same_grid(a, b);
        std::vector<double> q(a.size()), qp(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            q[i] = a.q_[i] - b.q_[i];
            qp[i] = a.qprime_[i] - b.qprime_[i];
        }
        return ProfilePair(a.grid_, std::move(q), std::move(qp));
    }

    friend ProfilePair operator+(const ProfilePair& a, const ProfilePair& b) {
        require_same_grid(a, b);
        std::vector<double> q(a.size()), qp(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            q[i] = a.q_[i] + b.q_[i];
            qp[i] = a.qprime_[i] + b.qprime_[i];
        }
        return ProfilePair(a.grid_, std::move(q), std::move(qp));
    }

    friend ProfilePair operator*(double c, const ProfilePair& a) {
        std::vector<double> q(a.size()), qp(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            q[i] = c * a.q_[i];
            qp[i] = c * a.qprime_[i];
        }
        q[0] = 0.0;
        return ProfilePair(a.grid_, std::move(q), std::move(qp));
    }

    static void require_same_grid(const ProfilePair& a, const ProfilePair& b) {
        if (a.grid_ != b.grid_ && !a.grid_->same_nodes(*b.grid_)) {
            throw DomainError("profiles live on different grids");
        }
    }

private:
    GridPtr grid_;
    std::vector<double> q_;
    std::vector<double> qprime_;
};

enum class Component { value, derivative };

/// max_{i>=1} |x_i r_i^alpha|, the discrete weighted sup norm |.|_alpha.
/// The node r = 0 is excluded; alpha = 0 is the plain sup.
inline double weighted_norm(const ProfilePair& p, double alpha, Component which) {
    if (alpha > 0.0) {
        throw DomainError("weighted_norm: alpha must be <= 0");
    }
    const auto nodes = p.grid()->nodes();
    const auto samples = which == Component::value ? p.q() : p.qprime();
    double sup = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i])) {
            throw EvaluationError("weighted_norm: non-finite sample at node " + std::to_string(i));
        }
        const double weight = alpha == 0.0 ? 1.0 : std::pow(nodes[i], alpha);
        sup = std::max(sup, std::abs(samples[i] * weight));
    }
    return sup;
}

/// ||Q|| = max{|Q|_{2-d}, |Q'|_{3-d}}.
inline double pair_norm(const ProfilePair& p, double d) {
    return std::max(weighted_norm(p, 2.0 - d, Component::value),
                    weighted_norm(p, 3.0 - d, Component::derivative));
}

}  // namespace radfix
