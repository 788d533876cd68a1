#pragma once

// Green kernel of -Q'' + (d-1) Q'/r with Q(0) = Q(1) = 0, the fixed-point
// operator T and the physical fields reconstructed from a profile.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "radfix/error.hpp"
#include "radfix/model.hpp"

namespace radfix {

namespace detail {

inline void check_unit_interval(double r, double s, const char* who) {
    if (!(r >= 0.0 && r <= 1.0) || !(s >= 0.0 && s <= 1.0)) {
        throw DomainError(std::string(who) + ": arguments must lie in [0,1]");
    }
}

}  // namespace detail

/// G(r,s) = min^d (1 - max^d).
inline double green(double r, double s, double d) {
    detail::check_unit_interval(r, s, "green");
    if (r <= s) {
        return std::pow(r, d) * (1.0 - std::pow(s, d));
    }
    return std::pow(s, d) * (1.0 - std::pow(r, d));
}

/// dG/dr; at r == s the r < s branch is returned.
inline double green_dr(double r, double s, double d) {
    detail::check_unit_interval(r, s, "green_dr");
    if (r <= s) {
        return d * std::pow(r, d - 1.0) * (1.0 - std::pow(s, d));
    }
    return -d * std::pow(s, d) * std::pow(r, d - 1.0);
}

/// n_i = Q'_i r_i^{1-d} / sigma_d; n_0 by quadratic extrapolation from nodes 1..3.
inline std::vector<double> density(const ProfilePair& p, const ProblemParams& params) {
    const auto nodes = p.grid()->nodes();
    const auto qp = p.qprime();
    const double d = params.d();
    std::vector<double> n(p.size());
    for (std::size_t i = 1; i < n.size(); ++i) {
        n[i] = qp[i] * std::pow(nodes[i], 1.0 - d) / params.sigma_d();
        if (!std::isfinite(n[i])) {
            throw EvaluationError("density: non-finite value at node " + std::to_string(i));
        }
    }
    // Lagrange interpolant through (r1,n1), (r2,n2), (r3,n3), evaluated at 0.
    const double r1 = nodes[1], r2 = nodes[2], r3 = nodes[3];
    n[0] = n[1] * (r2 * r3) / ((r1 - r2) * (r1 - r3)) +
           n[2] * (r1 * r3) / ((r2 - r1) * (r2 - r3)) +
           n[3] * (r1 * r2) / ((r3 - r1) * (r3 - r2));
    return n;
}

/// phi(r) = -(1/sigma_d) int_r^1 Q(s) s^{1-d} ds by trapezoid, accumulated from r = 1.
inline std::vector<double> potential(const ProfilePair& p, const ProblemParams& params) {
    const auto nodes = p.grid()->nodes();
    const auto steps = p.grid()->steps();
    const auto q = p.q();
    const double d = params.d();
    std::vector<double> f(p.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) {
        f[i] = q[i] * std::pow(nodes[i], 1.0 - d);
    }
    std::vector<double> phi(p.size(), 0.0);
    for (std::size_t i = p.size() - 1; i-- > 0;) {
        phi[i] = phi[i + 1] - 0.5 * steps[i] * (f[i] + f[i + 1]) / params.sigma_d();
        if (!std::isfinite(phi[i])) {
            throw EvaluationError("potential: non-finite value at node " + std::to_string(i));
        }
    }
    return phi;
}

/// Applies T to (Q, Q'):
///   TQ(r)  = m r^d + (1/d) int_0^1 R(n(s)) s^{1-d} Q(s) G(r,s) ds
///   TQ'(r) = m d r^{d-1} + (1/d) int_0^1 R(n(s)) s^{1-d} Q(s) dG/dr(r,s) ds
/// with composite trapezoid quadrature on the grid. The kernel is separable on
/// each side of the diagonal, so both integrals reduce to a prefix sum over
/// s <= r (accumulated left to right) and a suffix sum over s > r (accumulated
/// right to left); the result is the same for every run. For the derivative,
/// the diagonal node is split into its left and right trapezoid halves so that
/// each side uses its own branch of dG/dr.
///
/// TQ(0) = 0 and TQ(1) = m are set exactly.
inline ProfilePair apply_T(const ProfilePair& p, const ProblemParams& params) {
    const auto& grid = *p.grid();
    const auto nodes = grid.nodes();
    const auto weights = grid.weights();
    const auto steps = grid.steps();
    const auto q = p.q();
    const std::size_t size = p.size();
    const std::size_t last = size - 1;
    const double d = params.d();
    const double m = params.m();
    const auto& R = params.nonlinearity();

    const std::vector<double> n = density(p, params);

    // rd[j] = s_j^d, rdm1[j] = s_j^{d-1}, integrand[j] = R(n_j) s_j^{1-d} Q_j.
    std::vector<double> rd(size), rdm1(size), integrand(size, 0.0);
    for (std::size_t j = 0; j < size; ++j) {
        rd[j] = std::pow(nodes[j], d);
        rdm1[j] = std::pow(nodes[j], d - 1.0);
    }
    rd[0] = 0.0;
    rdm1[0] = 0.0;
    rd[last] = 1.0;
    rdm1[last] = 1.0;
    for (std::size_t j = 1; j < size; ++j) {
        integrand[j] = R(n[j]) * q[j] * std::pow(nodes[j], 1.0 - d);
        if (!std::isfinite(integrand[j])) {
            throw EvaluationError("apply_T: non-finite integrand at node " + std::to_string(j));
        }
    }

    // below[i] = sum_{j<i} w_j F_j s_j^d ; outer[i] = sum_{j>i} w_j F_j (1 - s_j^d)
    std::vector<double> below(size), outer(size);
    double acc = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
        below[j] = acc;
        acc += weights[j] * integrand[j] * rd[j];
    }
    acc = 0.0;
    for (std::size_t j = size; j-- > 0;) {
        outer[j] = acc;
        acc += weights[j] * integrand[j] * (1.0 - rd[j]);
    }

    std::vector<double> tq(size), tqp(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double inner = below[i] + weights[i] * integrand[i] * rd[i];
        const double integral = (1.0 - rd[i]) * inner + rd[i] * outer[i];
        tq[i] = m * rd[i] + integral / d;

        // Derivative: sum over s < r excludes the diagonal, which contributes
        // the left half-step with the s < r branch and the right half-step with
        // the s > r branch.
        const double left_half = i > 0 ? 0.5 * steps[i - 1] : 0.0;
        const double right_half = i < last ? 0.5 * steps[i] : 0.0;
        const double diagonal =
            integrand[i] * (right_half * (1.0 - rd[i]) - left_half * rd[i]);
        tqp[i] = rdm1[i] * (m * d - below[i] + diagonal + outer[i]);

        if (!std::isfinite(tq[i]) || !std::isfinite(tqp[i])) {
            throw EvaluationError("apply_T: non-finite output at node " + std::to_string(i));
        }
    }
    tq[0] = 0.0;
    tq[last] = m;
    return ProfilePair(p.grid(), std::move(tq), std::move(tqp));
}

}  // namespace radfix
