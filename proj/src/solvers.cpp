#include "fracsign/solvers.hpp"

#include "fracsign/errors.hpp"
#include "fracsign/frac_ops.hpp"
#include "fracsign/kernels.hpp"
#include "fracsign/parallel.hpp"
#include "fracsign/special.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace fracsign::solvers {

namespace {

void check_order(const char* who, double alpha, bool allow_one) {
    const bool ok = allow_one ? (alpha > 0.0 && alpha <= 1.0)
                              : (alpha > 0.0 && alpha < 1.0);
    if (!ok)
        throw DomainError(std::string(who) + ": order must lie in " +
                          (allow_one ? "(0,1]" : "(0,1)") + ", got " +
                          std::to_string(alpha));
}

std::vector<double> sample_nodes(const char* who,
                                 const std::function<double(double)>& fn,
                                 const UniformGrid& grid) {
    if (!fn)
        throw DomainError(std::string(who) + ": coefficient function is empty");
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) v[i] = fn(grid.node(i));
    return v;
}

void check_regular(const char* who, const GridFunction& g) {
    g.validate();
    if (g.singular != SingularEnd::none)
        throw DomainError(std::string(who) +
                          ": coefficient samples must be regular");
}

// Gamma(u)/Gamma(v) for positive arguments; switches to the log route once
// the plain values would overflow.
double gamma_ratio(double u, double v) {
    if (u < 170.0 && v < 170.0)
        return special::gamma(u) * special::reciprocal_gamma(v);
    return std::exp(std::lgamma(u) - std::lgamma(v));
}

} // namespace

GridFunction solve_vcf(const ConstantLinearIVP& p, std::size_t n) {
    check_order("solve_vcf", p.alpha, true);
    const UniformGrid grid(p.a, p.b, n);
    const double h = grid.h();

    GridFunction out(grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double z =
            p.lambda * std::pow(static_cast<double>(i) * h, p.alpha);
        out.values[i] = p.x_a * special::mittag_leffler(p.alpha, 1.0, z);
    }
    if (!p.forcing) return out;

    // Forced part: the kernel (t-s)^(alpha-1) E_{alpha,alpha}(lambda
    // (t-s)^alpha) against piecewise-linear forcing.  The power factor is
    // what the trapezoid weights integrate exactly; the Mittag-Leffler
    // factor is frozen at node distances.  E_{alpha,alpha}(0) = 1/Gamma(alpha)
    // already carries the normalization, so no prefactor appears.
    const auto tw = frac_ops::detail::trap_weights(p.alpha, h, n);
    std::vector<double> f(n), m(n), wm_rev(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = p.forcing(grid.node(i));
    for (std::size_t d = 0; d < n; ++d) {
        const double z =
            p.lambda * std::pow(static_cast<double>(d) * h, p.alpha);
        m[d] = special::mittag_leffler(p.alpha, p.alpha, z);
        wm_rev[n - 1 - d] = tw.wrev[n - 1 - d] * m[d];
    }
    for (std::size_t i = 1; i < n; ++i) {
        double s = kernels::dot(&wm_rev[n - 1 - i], f.data(), i + 1);
        s -= tw.B[i + 1] * m[i] * f[0];
        out.values[i] += s;
        if (!std::isfinite(out.values[i]))
            throw OverflowError("solve_vcf: solution overflowed at t = " +
                                std::to_string(grid.node(i)));
    }
    return out;
}

SeriesSolution solve_resolvent(double alpha, const GridFunction& g, double x_a,
                               const SeriesOptions& opts) {
    check_order("solve_resolvent", alpha, true);
    check_regular("solve_resolvent", g);
    if (opts.max_levels == 0)
        throw DomainError("solve_resolvent: max_levels must be positive");
    const std::size_t n = g.grid.n;
    const double h = g.grid.h();
    const double ga = g.values[0];

    bool constant_g = true;
    for (std::size_t i = 1; i < n && constant_g; ++i)
        constant_g = (g.values[i] == ga);

    // (t-a)^alpha per node; pw accumulates (t-a)^{j alpha} level by level.
    std::vector<double> za(n), pw(n, 1.0);
    za[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        za[i] = std::pow(static_cast<double>(i) * h, alpha);

    // shape = solution for x_a = 1; scaling at the end keeps the solve
    // exactly linear in the initial value.
    std::vector<double> shape(n, 1.0);
    std::vector<double> r(n, 0.0), q(n);
    double c = 1.0;
    std::size_t levels = 0;
    double last = 0.0;
    bool done = false;
    for (std::size_t j = 1; j <= opts.max_levels; ++j) {
        const double c_prev = c;
        c = ga * c_prev *
            gamma_ratio(static_cast<double>(j - 1) * alpha + 1.0,
                        static_cast<double>(j) * alpha + 1.0);
        if (!constant_g) {
            // remainder chain: r_j = I^alpha[g r_{j-1} + (g - g(a)) c_{j-1}
            // (t-a)^{(j-1)alpha}]; the integrand vanishes at a, so the
            // quadrature sees nothing singular.
            for (std::size_t i = 0; i < n; ++i)
                q[i] = g.values[i] * r[i] +
                       (g.values[i] - ga) * c_prev * pw[i];
            r = frac_ops::left_frac_integral(GridFunction(g.grid, q), alpha)
                    .values;
        }
        double sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pw[i] *= za[i];
            const double y = c * pw[i] + r[i];
            shape[i] += y;
            if (std::abs(y) > sup) sup = std::abs(y);
        }
        if (!std::isfinite(sup))
            throw OverflowError("solve_resolvent: series level " +
                                std::to_string(j) + " overflowed");
        levels = j;
        last = sup;
        if (sup < opts.tol) {
            done = true;
            break;
        }
    }
    if (!done)
        throw ConvergenceError(
            "solve_resolvent: level sup still " + std::to_string(last) +
                " after " + std::to_string(levels) +
                " levels; raise max_levels or shrink the window",
            static_cast<int>(levels), last);

    GridFunction out(g.grid);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = x_a * shape[i];
    return {std::move(out), levels, last};
}

SeriesSolution solve_resolvent(const VariableLinearIVP& p, std::size_t n,
                               const SeriesOptions& opts) {
    check_order("solve_resolvent", p.alpha, true);
    const UniformGrid grid(p.a, p.b, n);
    const GridFunction g(grid, sample_nodes("solve_resolvent", p.g, grid));
    return solve_resolvent(p.alpha, g, p.x_a, opts);
}

GridFunction solve_linear_implicit(double alpha, const GridFunction& g,
                                   double x_a) {
    check_order("solve_linear_implicit", alpha, true);
    check_regular("solve_linear_implicit", g);
    const std::size_t n = g.grid.n;
    const auto tw = frac_ops::detail::trap_weights(alpha, g.grid.h(), n);
    const double inv_gamma = special::reciprocal_gamma(alpha);
    const double w0 = tw.wrev[n - 1]; // weight of the newest sample

    GridFunction out(g.grid);
    std::vector<double> rhs(n); // g(t_i) x_i as it becomes known
    out.values[0] = x_a;
    rhs[0] = g.values[0] * x_a;
    for (std::size_t i = 1; i < n; ++i) {
        double hist = kernels::dot(&tw.wrev[n - 1 - i], rhs.data(), i);
        hist -= tw.B[i + 1] * rhs[0];
        const double den = 1.0 - inv_gamma * w0 * g.values[i];
        if (!(den > 0.25))
            throw DomainError(
                "solve_linear_implicit: implicit factor " +
                std::to_string(den) + " at t = " +
                std::to_string(g.grid.node(i)) + "; refine the grid");
        const double x = (x_a + inv_gamma * hist) / den;
        if (!std::isfinite(x))
            throw OverflowError(
                "solve_linear_implicit: solution overflowed at t = " +
                std::to_string(g.grid.node(i)));
        out.values[i] = x;
        rhs[i] = g.values[i] * x;
    }
    return out;
}

GridFunction solve_linear_implicit(const VariableLinearIVP& p, std::size_t n) {
    check_order("solve_linear_implicit", p.alpha, true);
    const UniformGrid grid(p.a, p.b, n);
    const GridFunction g(grid,
                         sample_nodes("solve_linear_implicit", p.g, grid));
    return solve_linear_implicit(p.alpha, g, p.x_a);
}

SeriesSolution solve_right_series(double alpha, const GridFunction& g,
                                  double x_b, const SeriesOptions& opts) {
    check_order("solve_right_series", alpha, false);
    check_regular("solve_right_series", g);
    if (opts.max_levels == 0)
        throw DomainError("solve_right_series: max_levels must be positive");
    const std::size_t n = g.grid.n;
    const double h = g.grid.h();

    // Leading term: x_b (b-t)^(alpha-1) / Gamma(alpha), stored flagged with
    // the coefficient in the b slot.  All later terms carry strictly larger
    // powers of (b-t), so the output keeps exactly this coefficient and the
    // terminal weight I_{b-}^{1-alpha}[x](b) = x_b holds by the power rule.
    GridFunction phi(g.grid);
    phi.singular = SingularEnd::right;
    phi.sigma = alpha - 1.0;
    const double c0 = x_b * special::reciprocal_gamma(alpha);
    phi.values[n - 1] = c0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        phi.values[i] =
            c0 * std::pow(static_cast<double>(n - 1 - i) * h, alpha - 1.0);

    GridFunction out = phi;

    const double gb = g.values[n - 1];
    std::size_t levels = 0;
    double last = 0.0;
    bool done = false;
    for (std::size_t k = 1; k <= opts.max_levels; ++k) {
        GridFunction q = phi;
        if (q.singular == SingularEnd::right) {
            // multiply by g; the singular coefficient rides with g(b)
            for (std::size_t i = 0; i + 1 < n; ++i)
                q.values[i] = g.values[i] * phi.values[i];
            q.values[n - 1] = gb * phi.values[n - 1];
        } else {
            for (std::size_t i = 0; i < n; ++i)
                q.values[i] = g.values[i] * phi.values[i];
        }
        phi = frac_ops::right_frac_integral(q, alpha);

        double sup = 0.0;
        const std::size_t top =
            (phi.singular == SingularEnd::right) ? n - 1 : n;
        for (std::size_t i = 0; i < top; ++i)
            if (std::abs(phi.values[i]) > sup) sup = std::abs(phi.values[i]);
        if (!std::isfinite(sup))
            throw OverflowError("solve_right_series: series level " +
                                std::to_string(k) + " overflowed");

        // interior accumulation; the b slot keeps the leading coefficient
        for (std::size_t i = 0; i + 1 < n; ++i) out.values[i] += phi.values[i];
        levels = k;
        last = sup;
        if (sup < opts.tol) {
            done = true;
            break;
        }
    }
    if (!done)
        throw ConvergenceError(
            "solve_right_series: level sup still " + std::to_string(last) +
                " after " + std::to_string(levels) +
                " levels; raise max_levels or shrink the window",
            static_cast<int>(levels), last);
    return {std::move(out), levels, last};
}

SeriesSolution solve_right_series(const RightTerminalIVP& p, std::size_t n,
                                  const SeriesOptions& opts) {
    check_order("solve_right_series", p.alpha, false);
    const UniformGrid grid(p.a, p.b, n);
    const GridFunction g(grid, sample_nodes("solve_right_series", p.g, grid));
    return solve_right_series(p.alpha, g, p.x_b, opts);
}

GridFunction predictor_corrector(const NonlinearIVP& p, std::size_t n) {
    check_order("predictor_corrector", p.alpha, true);
    if (!p.f)
        throw DomainError("predictor_corrector: right-hand side is empty");
    const UniformGrid grid(p.a, p.b, n);
    const double h = grid.h();
    const auto tw = frac_ops::detail::trap_weights(p.alpha, h, n);
    const double inv_gamma = special::reciprocal_gamma(p.alpha);

    // rectangle-rule predictor weights, reversed like wrev:
    // P[d] = h^alpha (d^alpha - (d-1)^alpha)/alpha, d >= 1
    std::vector<double> prev_w(n, 0.0);
    for (std::size_t d = 1; d < n; ++d)
        prev_w[n - 1 - d] = tw.h_alpha *
                            frac_ops::detail::power_diff(
                                p.alpha, static_cast<double>(d)) /
                            p.alpha;

    GridFunction out(grid);
    std::vector<double> rhs(n);
    out.values[0] = p.x_a;
    rhs[0] = p.f(grid.node(0), p.x_a);
    for (std::size_t i = 1; i < n; ++i) {
        const double t = grid.node(i);
        const double pred =
            p.x_a +
            inv_gamma * kernels::dot(&prev_w[n - 1 - i], rhs.data(), i);
        rhs[i] = p.f(t, pred);
        double s = kernels::dot(&tw.wrev[n - 1 - i], rhs.data(), i + 1);
        s -= tw.B[i + 1] * rhs[0];
        const double x = p.x_a + inv_gamma * s;
        if (!std::isfinite(x))
            throw OverflowError(
                "predictor_corrector: solution overflowed at t = " +
                std::to_string(t));
        out.values[i] = x;
        rhs[i] = p.f(t, x);
    }
    return out;
}

double KernelStack::k(std::size_t j, std::size_t i, std::size_t m) const {
    if (j == 0 || j > levels.size())
        throw DomainError("KernelStack::k: level " + std::to_string(j) +
                          " not built");
    const auto& cols = levels[j - 1];
    if (m >= cols.size() || i < m || i >= grid.n)
        throw DomainError("KernelStack::k: node pair (" + std::to_string(i) +
                          ", " + std::to_string(m) + ") out of range");
    return cols[m].values[i - m];
}

KernelStack build_kernels(const VariableLinearIVP& p, std::size_t n,
                          std::size_t levels) {
    check_order("build_kernels", p.alpha, true);
    if (levels == 0)
        throw DomainError("build_kernels: need at least one level");
    if (n > 2048)
        throw DomainError(
            "build_kernels: stacks above n = 2048 exceed the memory budget");
    const UniformGrid grid(p.a, p.b, n);
    const double h = grid.h();
    const auto gv = sample_nodes("build_kernels", p.g, grid);
    const double inv_gamma = special::reciprocal_gamma(p.alpha);

    KernelStack ks;
    ks.alpha = p.alpha;
    ks.grid = grid;
    ks.levels.resize(levels);

    auto& first = ks.levels[0];
    first.reserve(n - 1);
    for (std::size_t m = 0; m + 1 < n; ++m) {
        const UniformGrid tail(grid.node(m), grid.b, n - m);
        GridFunction col(tail);
        if (p.alpha == 1.0) {
            // k_1(t,s) = g(s): constant in t, nothing singular
            for (auto& v : col.values) v = gv[m];
        } else {
            col.singular = SingularEnd::left;
            col.sigma = p.alpha - 1.0;
            col.values[0] = gv[m] * inv_gamma;
            for (std::size_t i = 1; i < n - m; ++i)
                col.values[i] =
                    col.values[0] *
                    std::pow(static_cast<double>(i) * h, p.alpha - 1.0);
        }
        first.push_back(std::move(col));
    }

    for (std::size_t j = 2; j <= levels; ++j) {
        const auto& below = ks.levels[j - 2];
        auto& cur = ks.levels[j - 1];
        cur.resize(n - 1);
        parallel_for(n - 1, [&](std::size_t m) {
            GridFunction q = below[m];
            const std::size_t len = q.size();
            if (q.singular == SingularEnd::left) {
                q.values[0] *= gv[m];
                for (std::size_t i = 1; i < len; ++i) q.values[i] *= gv[m + i];
            } else {
                for (std::size_t i = 0; i < len; ++i) q.values[i] *= gv[m + i];
            }
            cur[m] = frac_ops::left_frac_integral(q, p.alpha);
        });
    }
    return ks;
}

} // namespace fracsign::solvers
