#pragma once

#include "fracsign/grid.hpp"

#include <cstddef>
#include <functional>
#include <string>

// Sign verdicts on computed trajectories and the Mittag-Leffler lower-bound
// sweep.
//
// Verdicts are about node values only; nothing between nodes is certified.
// Thresholds are strict rather than padded: discretization error is managed
// by the callers (solver cross-agreement, resolution doubling), not hidden
// in inflated tolerances here.

namespace fracsign::sign_analysis {

enum class Verdict { positive, nonnegative, violated };

struct SignReport {
    Verdict verdict{Verdict::violated};
    double min_value{};     // smallest value seen (sign-adjusted gap for separation)
    double argmin{};        // abscissa where it happened
    std::size_t checked{};  // nodes inspected
    std::string note;       // nonempty when a precondition was broken
};

const char* to_string(Verdict v);

// Strict positivity at every non-singular node.  A minimum inside
// [-tol_zero, tol_zero] counts as noise and yields `nonnegative`; anything
// below -tol_zero is `violated`.  tol_pos raises the bar for `positive`.
SignReport check_positive(const GridFunction& x, double tol_zero = 1e-12,
                          double tol_pos = 0.0);

// x1 - x2 must keep the sign it has at the first node, with magnitude above
// tol_zero, at every shared node.  Requires x1(a) != x2(a).
SignReport check_separation(const GridFunction& x1, const GridFunction& x2,
                            double tol_zero = 1e-12);

// Solves ^CD_{a+}^alpha[x] = f(t,x), x(a) = x_a > 0 on the grid by the
// predictor-corrector and checks positivity.  f(t,0) = 0 is the caller's
// assertion; it is spot-checked at every node and a nonzero value produces
// a `violated` report with a note instead of a solve.
SignReport check_nonlinear_positive(
    const std::function<double(double, double)>& f, double x_a, double alpha,
    const UniformGrid& grid, double tol_zero = 1e-12);

// E_alpha(lambda t^alpha) - lambda t^alpha / Gamma(alpha+1) - 1.  Exact zero
// at t = 0.  When the Mittag-Leffler value leaves double range the margin is
// reported as +infinity: the bound holds trivially there.
double bernoulli_margin(double alpha, double lambda, double t);

// Inclusive arithmetic progression min, min+step, ..., max (the last value
// is clamped onto max to keep accumulated rounding out of domain checks).
struct SweepRange {
    double min{};
    double max{};
    double step{};
};

struct BernoulliSweepReport {
    double worst_margin{};
    double alpha{};   // tuple where the worst margin sat
    double lambda{};
    double t{};
    std::size_t evaluated{};
    std::size_t overflowed{};  // margins that came back +infinity
};

// Worst margin over the tuple grid; (alpha, lambda) pairs run in parallel,
// the reduction order is fixed, and ties keep the earliest tuple.
BernoulliSweepReport bernoulli_sweep(const SweepRange& alphas,
                                     const SweepRange& lambdas,
                                     const SweepRange& ts);

} // namespace fracsign::sign_analysis
