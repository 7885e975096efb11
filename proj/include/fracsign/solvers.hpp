#pragma once

#include "fracsign/grid.hpp"

#include <cstddef>
#include <functional>
#include <vector>

// Initial-value solvers for linear and mildly nonlinear Caputo problems and
// the right-sided terminal problem behind the adjoint equations.
//
// The three linear routes are implemented independently on purpose: the
// variation-of-constants formula leans on the Mittag-Leffler evaluator, the
// successive-approximation series leans on the fractional integral, and the
// predictor-corrector marches the Volterra form step by step.  Agreement
// between them is the toolkit's main cross-check.

namespace fracsign::solvers {

// ^CD_{a+}^alpha[x] = lambda*x + forcing(t), x(a) = x_a, constant lambda.
struct ConstantLinearIVP {
    double alpha{};
    double a{0.0};
    double b{1.0};
    double x_a{1.0};
    double lambda{0.0};
    std::function<double(double)> forcing; // empty means no forcing term
};

// ^CD_{a+}^alpha[x] = g(t)*x, x(a) = x_a.
struct VariableLinearIVP {
    double alpha{};
    double a{0.0};
    double b{1.0};
    double x_a{1.0};
    std::function<double(double)> g;
};

// D_{b-}^alpha[x] = g(t)*x with terminal weight I_{b-}^{1-alpha}[x](b) = x_b.
// alpha strictly inside (0,1): at alpha = 1 the terminal weight degenerates
// to a plain boundary value and the problem is an ordinary backward ODE.
struct RightTerminalIVP {
    double alpha{};
    double a{0.0};
    double b{1.0};
    double x_b{1.0};
    std::function<double(double)> g;
};

// ^CD_{a+}^alpha[x] = f(t, x), x(a) = x_a.
struct NonlinearIVP {
    double alpha{};
    double a{0.0};
    double b{1.0};
    double x_a{1.0};
    std::function<double(double, double)> f;
};

struct SeriesOptions {
    double tol{1e-10};          // stop once sup|level| falls below this
    std::size_t max_levels{60}; // then give up with ConvergenceError
};

struct SeriesSolution {
    GridFunction x;
    std::size_t levels{};  // levels actually summed
    double last_term{};    // sup norm of the last level added
};

// Closed-form route: x = x_a E_alpha(lambda (t-a)^alpha) plus, when forcing
// is present, the Mittag-Leffler-kernel convolution integrated by product
// trapezoids with the kernel factor taken at node distances.
GridFunction solve_vcf(const ConstantLinearIVP& p, std::size_t n);

// Successive approximations x = x_a (1 + sum_j y_j), y_j = I^alpha[g y_{j-1}].
// Each level is split into its leading power c_j (t-a)^{j alpha}, advanced
// exactly through the power rule, plus a remainder handled by quadrature;
// for constant g the remainder vanishes and the sum is the Mittag-Leffler
// series itself, term by term.  The overload takes g sampled on the grid.
SeriesSolution solve_resolvent(const VariableLinearIVP& p, std::size_t n,
                               const SeriesOptions& opts = {});
SeriesSolution solve_resolvent(double alpha, const GridFunction& g, double x_a,
                               const SeriesOptions& opts = {});

// One-pass implicit product-trapezoid march for the same problem.  Cheap and
// robust for long windows where the series needs hundreds of levels; used by
// the randomized sign batteries.  Refuses steps where the implicit factor
// 1 - c*h^alpha*g(t) drops below 0.25.
GridFunction solve_linear_implicit(const VariableLinearIVP& p, std::size_t n);
GridFunction solve_linear_implicit(double alpha, const GridFunction& g,
                                   double x_a);

// Right-sided terminal problem via the series x = sum_k phi_k starting from
// phi_0 = x_b (b-t)^{alpha-1}/Gamma(alpha), phi_{k+1} = I_{b-}^alpha[g phi_k].
// The result is flagged singular at b with the phi_0 coefficient; interior
// nodes carry the summed values.  The overload takes g sampled on the grid.
SeriesSolution solve_right_series(const RightTerminalIVP& p, std::size_t n,
                                  const SeriesOptions& opts = {});
SeriesSolution solve_right_series(double alpha, const GridFunction& g,
                                  double x_b, const SeriesOptions& opts = {});

// Rectangle-rule predictor plus one product-trapezoid corrector pass per
// step on the Volterra form of the problem.  f is evaluated only at grid
// abscissae.
GridFunction predictor_corrector(const NonlinearIVP& p, std::size_t n);

// Iterated kernels of the Volterra form of the variable-coefficient
// problem: k_1(t,s) = g(s)(t-s)^{alpha-1}/Gamma(alpha) and each further
// level is the order-alpha left integral, in t, of g times the previous
// one.  Column m of a level lives on the tail grid [s_m, b] and is flagged
// singular at its left end while the accumulated power stays negative.
struct KernelStack {
    double alpha{};
    UniformGrid grid;
    // levels[j-1][m] holds k_j(., s_m) for m = 0..n-2.
    std::vector<std::vector<GridFunction>> levels;

    // k_j(t_i, s_m), i >= m.  On a singular column i == m addresses the
    // coefficient slot rather than a sample.
    double k(std::size_t j, std::size_t i, std::size_t m) const;
};

KernelStack build_kernels(const VariableLinearIVP& p, std::size_t n,
                          std::size_t levels);

} // namespace fracsign::solvers
