#pragma once

#include "fracsign/expr.hpp"
#include "fracsign/grid.hpp"
#include "fracsign/solvers.hpp"

#include <cstddef>
#include <functional>
#include <string>

// Generalized variational pipeline: minimize the terminal value z(b) of an
// auxiliary functional driven by a Lagrangian L(t, x, u, z), where u is the
// order-alpha Caputo derivative of the state x and x(a), z(a) are fixed
// while x(b), z(b) stay free.
//
// The stages are independent so they can cross-check each other: forward
// integration of z, the backward adjoint solve, the first-order residual in
// integral form, the pointwise second-order condition, order-one closed
// forms, and a direct descent optimizer producing candidates from scratch.

namespace fracsign::herglotz {

// Problem data.  The four partials and the second u-partial are supplied by
// the caller (there is no symbolic engine); validate_partials cross-checks
// them against finite differences of L before they are trusted.
struct HerglotzProblem {
    double alpha{};  // in (0,1]
    double a{0.0};
    double b{1.0};
    double x_a{0.0};
    double z_a{0.0};
    expr::Expression L;     // L(t, x, u, z)
    expr::Expression d2L;   // dL/dx
    expr::Expression d3L;   // dL/du
    expr::Expression d4L;   // dL/dz
    expr::Expression d33L;  // d2L/du2
};

struct CandidateSolution {
    GridFunction x;
    GridFunction u;  // control = order-alpha Caputo derivative of x
    GridFunction z;
    double objective{};  // z(b)
};

struct AdjointSolution {
    GridFunction p;  // flagged singular at b when alpha < 1
    // |I_{b-}^{1-alpha}[p](b) + 1|, recomputed from p by quadrature
    double terminal_gap{};
};

struct ELReport {
    GridFunction residual;  // on the trimmed grid [a, b-h]
    double sup{};           // over nodes with t <= b - delta
    double delta{};
    bool pass{};
};

struct LegendreReport {
    double min_value{};  // of d33L along the candidate, all nodes
    double argmin{};
    bool pass{};
};

struct ClassicalReport {
    GridFunction integral_residual;      // order-one first-order condition
    GridFunction differential_residual;  // its differentiated form
    double integral_sup{};               // both over t <= b - delta
    double differential_sup{};
    double delta{};
    bool pass{};
};

struct MinimizeOptions {
    double gtol{1e-6};             // sup-norm gradient target
    std::size_t max_iterations{5000};
    double fd_step{1e-6};          // relative forward-difference step
};

struct MinimizeResult {
    CandidateSolution candidate;
    std::size_t iterations{};
    double grad_norm{};
    bool converged{};
    std::string note;  // nonempty when the line search gave up early
};

// Cross-checks d2L, d3L, d4L against central differences of L, and d33L
// against central differences of d3L, at a fixed set of sample points.
// Throws SpecError naming the first partial that disagrees.
void validate_partials(const HerglotzProblem& prob);

// z along a given state/control pair: predictor-corrector on
// ^CD^alpha[z] = L(t, x(t), u(t), z), z(a) = z_a.
GridFunction forward_z(const HerglotzProblem& prob, const GridFunction& x,
                       const GridFunction& u);

// Candidate from a control: x = x_a + I^alpha[u], z from forward_z.
CandidateSolution candidate_from_control(const HerglotzProblem& prob,
                                         const GridFunction& u);

// Equivalent terminal-free form for z-independent L: the shifted integrand
// L-hat(t,x,v) = L + Gamma(alpha) z_a (b-t)^{1-alpha} / (b-a), whose
// weighted integral (1/Gamma(alpha)) int_a^b (b-t)^{alpha-1} L-hat dt equals
// z(b).  Rejects problems whose L references z.
struct ReducedForm {
    std::function<double(double, double, double)> integrand;  // L-hat(t,x,v)
    // the weighted integral along a candidate, evaluated by quadrature
    std::function<double(const CandidateSolution&)> objective;
};
ReducedForm reduce_z_independent(const HerglotzProblem& prob);

// Backward multiplier: D_{b-}^alpha[p] = p * d4L along the candidate with
// terminal weight I_{b-}^{1-alpha}[p](b) = -1; order one uses the closed
// form p = -exp(int_t^b d4L).
AdjointSolution solve_adjoint(const HerglotzProblem& prob,
                              const CandidateSolution& cand,
                              const solvers::SeriesOptions& opts = {});

// First-order condition in integral form: I_{b-}^alpha[p d2L](t) + p(t) d3L(t)
// on [a, b-h], sup-normed away from the singular tip.  delta < 0 means the
// default 0.05 (b-a).
ELReport el_residual(const HerglotzProblem& prob, const CandidateSolution& cand,
                     const AdjointSolution& adj, double delta = -1.0,
                     double tol = 5e-3);

// Pointwise second-order condition: d33L >= 0 along the candidate.
LegendreReport legendre_check(const HerglotzProblem& prob,
                              const CandidateSolution& cand,
                              double tol = 1e-10);

// Order-one only: residuals of the classical first-order condition in both
// integral and differentiated form.  delta as in el_residual.
ClassicalReport classical_conditions(const HerglotzProblem& prob,
                                     const CandidateSolution& cand,
                                     double delta = -1.0, double tol = 5e-3);

// Plain descent on z(b) over the control values at all nodes: forward
// finite-difference gradient, backtracking line search, stop on gradient
// sup-norm or the iteration cap.  Returns the best candidate found.
MinimizeResult direct_minimize(const HerglotzProblem& prob,
                               const GridFunction& u_init,
                               const MinimizeOptions& opts = {});

} // namespace fracsign::herglotz
