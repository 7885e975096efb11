#pragma once

#include "fracsign/grid.hpp"

#include <cstddef>
#include <vector>

// Left/right fractional integrals and derivatives on uniform grids.
//
// Quadrature is product-trapezoidal: on each panel the smooth factor is
// interpolated linearly and the kernel (t-s)^(alpha-1) integrated exactly.
// Inputs flagged singular at an endpoint are split into the power part
// c*(s-a)^sigma, integrated exactly by the power rule, and a bounded
// remainder fed to the quadrature, so the singular node is never sampled
// and pure power inputs come out exact.

namespace fracsign::frac_ops {

// I_{a+}^alpha[f] on the same grid.  alpha in [0,1]; alpha = 0 is the
// identity.  A singular-at-a input with sigma + alpha < 0 produces a
// singular-at-a output (order sigma + alpha); otherwise the output is
// regular, with the a-node value taken from the exact power-rule limit.
GridFunction left_frac_integral(const GridFunction& f, double alpha);

// Mirror image about t -> a+b-t.
GridFunction right_frac_integral(const GridFunction& f, double alpha);

// L1-scheme Caputo derivative, alpha in (0,1]; alpha = 1 falls back to
// finite differences (centered inside, one-sided at the ends).  Requires a
// regular (unflagged) input.
GridFunction caputo_left_derivative(const GridFunction& f, double alpha);

// Right Riemann-Liouville derivative -d/dt I_{b-}^{1-alpha}[f], alpha in
// (0,1].  The derivative is not formed at b, so the result lives on the
// trimmed grid [a, b-h] with n-1 nodes.
GridFunction rl_right_derivative(const GridFunction& f, double alpha);

namespace detail {

// Product-trapezoidal weight tables for step h and n nodes, shared by the
// integral drivers and the linear solvers.
//
//   A[r], B[r] (r = 1..n-1): panel weights for the left and right node of a
//   panel whose left edge sits r*h away from the evaluation point;
//   wrev[n-1-d] = w[d] with w[0] = B[1], w[d] = A[d] + B[d+1], so that
//   sum_k w[i-k] f_k = dot(&wrev[n-1-i], f, i+1) is a contiguous slice.
//
// None of the entries include the 1/Gamma(alpha) normalization.
struct TrapWeights {
    std::vector<double> A, B; // index r; slot 0 unused
    std::vector<double> wrev;
    double h_alpha; // h^alpha
};

TrapWeights trap_weights(double alpha, double h, std::size_t n);

// r^p - (r-1)^p without cancellation for large r.
double power_diff(double p, double r);

} // namespace detail

} // namespace fracsign::frac_ops
