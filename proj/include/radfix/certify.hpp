#pragma once

// Contraction constants A1..A4, the smallness condition on the ball radius,
// the largest certifiable mass, and an empirical check of the norm estimates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "radfix/error.hpp"
#include "radfix/model.hpp"
#include "radfix/operator.hpp"

namespace radfix {

struct Constants {
    double a1;
    double a2;
    double a3;
    double a4;
};

/// 2 A_i sigma_d (d-2) = L, L(d+4), L+1, L(d+4)+1.
inline Constants constants(double d, double lipschitz) {
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
        throw DomainError("constants: Lipschitz constant must be finite and > 0");
    }
    const double denom = 2.0 * sphere_measure(d) * (d - 2.0);
    return Constants{
        lipschitz / denom,
        lipschitz * (d + 4.0) / denom,
        (lipschitz + 1.0) / denom,
        (lipschitz * (d + 4.0) + 1.0) / denom,
    };
}

inline Constants constants(const ProblemParams& params) {
    return constants(params.d(), params.lipschitz());
}

/// Admissible radii [lo, hi): a2 rho^2 - rho + m d <= 0 and a4 rho < 1.
struct RhoInterval {
    double lo;
    double hi;  // exclusive
};

inline std::optional<RhoInterval> admissible_interval(double d, double lipschitz, double m) {
    const Constants c = constants(d, lipschitz);
    const double md = m * d;
    const double disc = 1.0 - 4.0 * c.a2 * md;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double root = std::sqrt(disc);
    // Smaller root in the cancellation-free form 2 m d / (1 + sqrt(disc)).
    const double lower_root = 2.0 * md / (1.0 + root);
    const double upper_root = (1.0 + root) / (2.0 * c.a2);
    const double cap = 1.0 / c.a4;
    const double hi = std::min(upper_root, cap);
    if (!(lower_root < hi)) {
        return std::nullopt;
    }
    return RhoInterval{lower_root, hi};
}

inline std::optional<RhoInterval> admissible_interval(const ProblemParams& params) {
    return admissible_interval(params.d(), params.lipschitz(), params.m());
}

/// Threshold below which the discriminant of the quadratic condition is
/// nonnegative, 1/(4 a2 d). It is the certified mass limit when L(d+4) > 1.
inline double discriminant_mass(double d, double lipschitz) {
    return 1.0 / (4.0 * constants(d, lipschitz).a2 * d);
}

/// Mass at which the smaller root reaches the contraction cap 1/a4. The
/// certified limit when L(d+4) <= 1.
inline double cap_mass(double d, double lipschitz) {
    const Constants c = constants(d, lipschitz);
    const double cap = 1.0 / c.a4;
    return (cap - c.a2 * cap * cap) / d;
}

/// Supremum of the masses with a nonempty admissible interval, by bisection
/// to relative 1e-12.
inline double max_mass_bisection(double d, double lipschitz) {
    auto admissible = [&](double m) { return admissible_interval(d, lipschitz, m).has_value(); };
    double lo = 0.0;
    double hi = 1.0;
    while (admissible(hi)) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            throw EvaluationError("max_mass: no upper bracket");
        }
    }
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (admissible(mid) ? lo : hi) = mid;
    }
    return lo;
}

/// Closed form where the discriminant binds (L(d+4) > 1), the cap-binding
/// closed form otherwise. max_mass_bisection is the independent arbiter.
inline double max_mass_closed_form(double d, double lipschitz) {
    if (lipschitz * (d + 4.0) > 1.0) {
        return discriminant_mass(d, lipschitz);
    }
    return cap_mass(d, lipschitz);
}

/// Largest certified mass. Bisection result, checked against the closed form.
inline double max_mass(double d, double lipschitz) {
    const double bisected = max_mass_bisection(d, lipschitz);
    const double closed = max_mass_closed_form(d, lipschitz);
    if (std::abs(bisected - closed) > 1e-9 * closed) {
        throw EvaluationError("max_mass: bisection " + std::to_string(bisected) +
                              " disagrees with closed form " + std::to_string(closed));
    }
    return bisected;
}

inline double max_mass(const ProblemParams& params) {
    return max_mass(params.d(), params.lipschitz());
}

struct ContractionCertificate {
    Constants constants;
    std::optional<RhoInterval> interval;
    double m_max;
    /// Valid only when certified().
    double chosen_rho = std::numeric_limits<double>::quiet_NaN();
    double q_bound = std::numeric_limits<double>::quiet_NaN();

    bool certified() const noexcept { return interval.has_value(); }
};

/// Radius defaults to the geometric mean of the interval endpoints.
inline ContractionCertificate certify(const ProblemParams& params) {
    ContractionCertificate cert{constants(params), admissible_interval(params), max_mass(params)};
    if (cert.interval) {
        const double lo = cert.interval->lo;
        const double hi = cert.interval->hi;
        double rho = std::sqrt(lo * hi);
        if (!(rho < hi)) {
            rho = std::nextafter(hi, lo);
        }
        cert.chosen_rho = std::max(rho, lo);
        cert.q_bound = cert.constants.a4 * cert.chosen_rho;
    }
    return cert;
}

/// Natural cubic spline through equally spaced knots on [0,1].
class NaturalCubicSpline {
public:
    explicit NaturalCubicSpline(std::vector<double> values)
        : values_(std::move(values)), second_(values_.size(), 0.0) {
        const std::size_t k = values_.size();
        if (k < 3) {
            throw DomainError("NaturalCubicSpline: need >= 3 knots");
        }
        h_ = 1.0 / static_cast<double>(k - 1);
        // Thomas algorithm for M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2.
        std::vector<double> diag(k, 4.0), rhs(k, 0.0);
        for (std::size_t i = 1; i + 1 < k; ++i) {
            rhs[i] = 6.0 * (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / (h_ * h_);
        }
        for (std::size_t i = 2; i + 1 < k; ++i) {
            const double w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = k - 1; i-- > 1;) {
            second_[i] = (rhs[i] - (i + 2 < k ? second_[i + 1] : 0.0)) / diag[i];
        }
    }

    double value(double x) const {
        const auto [i, a, b] = locate(x);
        return a * values_[i] + b * values_[i + 1] +
               ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) * h_ * h_ / 6.0;
    }

    double derivative(double x) const {
        const auto [i, a, b] = locate(x);
        return (values_[i + 1] - values_[i]) / h_ +
               (-(3.0 * a * a - 1.0) * second_[i] + (3.0 * b * b - 1.0) * second_[i + 1]) * h_ / 6.0;
    }

private:
    struct Cell {
        std::size_t i;
        double a;
        double b;
    };

    Cell locate(double x) const {
        const std::size_t cells = values_.size() - 1;
        auto i = static_cast<std::size_t>(std::clamp(x / h_, 0.0, static_cast<double>(cells)));
        i = std::min(i, cells - 1);
        const double b = (x - static_cast<double>(i) * h_) / h_;
        return {i, 1.0 - b, b};
    }

    std::vector<double> values_;
    std::vector<double> second_;
    double h_;
};

/// Random profile in the ball {||Q|| <= rho}: Q = r^{d-1} S(r) with S a
/// natural cubic spline through uniform values on [-1,1], rescaled so that
/// ||Q|| = u rho with u uniform in (0,1].
template <typename Rng>
ProfilePair random_ball_profile(const GridPtr& grid, double d, double rho, Rng& rng,
                                std::size_t knots = 6) {
    std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> values(knots);
    for (double& v : values) {
        v = value_dist(rng);
    }
    const NaturalCubicSpline spline(std::move(values));
    ProfilePair raw = ProfilePair::sample(
        grid, [&](double r) { return std::pow(r, d - 1.0) * spline.value(r); },
        [&](double r) {
            return (d - 1.0) * std::pow(r, d - 2.0) * spline.value(r) +
                   std::pow(r, d - 1.0) * spline.derivative(r);
        });
    const double norm = pair_norm(raw, d);
    const double fraction = 1.0 - unit(rng);
    if (!(norm > 0.0)) {
        return raw;
    }
    return (fraction * rho / norm) * raw;
}

enum class Estimate : int { self_value = 0, self_derivative = 1, lipschitz_value = 2, lipschitz_derivative = 3 };

inline const char* estimate_name(Estimate e) {
    switch (e) {
        case Estimate::self_value: return "self_value";
        case Estimate::self_derivative: return "self_derivative";
        case Estimate::lipschitz_value: return "lipschitz_value";
        case Estimate::lipschitz_derivative: return "lipschitz_derivative";
    }
    return "unknown";
}

struct EstimateViolation {
    std::size_t trial;
    Estimate estimate;
    double margin;
};

struct EstimateReport {
    std::size_t trials = 0;
    /// Minimal slack (bound minus observed) per estimate, indexed by Estimate.
    std::array<double, 4> min_margin{};
    double max_ratio = 0.0;
    std::vector<EstimateViolation> violations;

    double overall_min_margin() const { return *std::min_element(min_margin.begin(), min_margin.end()); }
};

struct NormEstimateMargins {
    std::array<double, 4> margin;
    std::optional<double> ratio;
};

/// Slack of the four estimates for one pair (Q, S).
inline NormEstimateMargins norm_estimate_margins(const ProfilePair& q, const ProfilePair& s,
                                                 const ProblemParams& params, const Constants& c) {
    const double d = params.d();
    const double m = params.m();
    const double value_alpha = 2.0 - d;
    const double deriv_alpha = 3.0 - d;

    const ProfilePair tq = apply_T(q, params);
    const ProfilePair ts = apply_T(s, params);

    const double q_val = weighted_norm(q, value_alpha, Component::value);
    const double q_der = weighted_norm(q, deriv_alpha, Component::derivative);
    const double s_val = weighted_norm(s, value_alpha, Component::value);

    const ProfilePair diff = q - s;
    const ProfilePair tdiff = tq - ts;
    const double mixed = std::max(weighted_norm(diff, value_alpha, Component::value) * q_der,
                                  weighted_norm(diff, deriv_alpha, Component::derivative) * s_val);

    NormEstimateMargins out{};
    out.margin[0] = c.a1 * q_val * q_der + m - weighted_norm(tq, value_alpha, Component::value);
    out.margin[1] = c.a2 * q_val * q_der + m * d - weighted_norm(tq, deriv_alpha, Component::derivative);
    out.margin[2] = c.a3 * mixed - weighted_norm(tdiff, value_alpha, Component::value);
    out.margin[3] = c.a4 * mixed - weighted_norm(tdiff, deriv_alpha, Component::derivative);
    const double denom = pair_norm(diff, d);
    if (denom > 0.0) {
        out.ratio = pair_norm(tdiff, d) / denom;
    }
    return out;
}

/// Draws `trials` pairs (Q, S) from the ball of radius rho and records the
/// slack of each estimate. Draws are reproducible: trial k uses a generator
/// seeded with (seed, k). Margins below -slack are listed as violations.
inline EstimateReport empirical_estimates(const ProblemParams& params, const GridPtr& grid, double rho,
                                          std::size_t trials, std::uint64_t seed, double slack = 1e-8) {
    if (trials < 1) {
        throw DomainError("empirical_estimates: trials must be >= 1");
    }
    if (!(rho > 0.0)) {
        throw DomainError("empirical_estimates: rho must be > 0");
    }
    const Constants c = constants(params);
    EstimateReport report;
    report.trials = trials;
    report.min_margin.fill(std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < trials; ++k) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(k)};
        std::mt19937_64 rng(seq);
        const ProfilePair q = random_ball_profile(grid, params.d(), rho, rng);
        const ProfilePair s = random_ball_profile(grid, params.d(), rho, rng);

        const NormEstimateMargins qs = norm_estimate_margins(q, s, params, c);
        // Self-map bounds are also checked with the roles swapped.
        const NormEstimateMargins sq = norm_estimate_margins(s, q, params, c);
        for (int e = 0; e < 4; ++e) {
            const double margin = std::min(qs.margin[e], sq.margin[e]);
            report.min_margin[e] = std::min(report.min_margin[e], margin);
            if (margin < -slack) {
                report.violations.push_back({k, static_cast<Estimate>(e), margin});
            }
        }
        for (const auto& ratio : {qs.ratio, sq.ratio}) {
            if (ratio) {
                report.max_ratio = std::max(report.max_ratio, *ratio);
            }
        }
    }
    return report;
}

}  // namespace radfix
