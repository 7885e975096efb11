#include "fracsign/sign_analysis.hpp"

#include "fracsign/errors.hpp"
#include "fracsign/parallel.hpp"
#include "fracsign/solvers.hpp"
#include "fracsign/special.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace fracsign::sign_analysis {

namespace {

Verdict classify(double min_value, double tol_zero, double tol_pos) {
    if (min_value > tol_zero && min_value > tol_pos) return Verdict::positive;
    if (min_value >= -tol_zero) return Verdict::nonnegative;
    return Verdict::violated;
}

std::size_t range_count(const char* who, const SweepRange& r) {
    if (!(r.step > 0.0) || !(r.max >= r.min) || !std::isfinite(r.min) ||
        !std::isfinite(r.max) || !std::isfinite(r.step))
        throw DomainError(std::string(who) +
                          ": range needs finite min <= max and step > 0");
    return static_cast<std::size_t>((r.max - r.min) / r.step + 0.5) + 1;
}

double range_value(const SweepRange& r, std::size_t i) {
    return std::min(r.min + static_cast<double>(i) * r.step, r.max);
}

} // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::positive: return "positive";
        case Verdict::nonnegative: return "nonnegative";
        case Verdict::violated: return "violated";
    }
    return "violated";
}

SignReport check_positive(const GridFunction& x, double tol_zero,
                          double tol_pos) {
    x.validate();
    SignReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.is_singular_node(i)) continue;
        ++rep.checked;
        if (x[i] < rep.min_value) {
            rep.min_value = x[i];
            rep.argmin = x.grid.node(i);
        }
    }
    if (rep.checked == 0)
        throw DomainError("check_positive: no regular nodes to check");
    rep.verdict = classify(rep.min_value, tol_zero, tol_pos);
    return rep;
}

SignReport check_separation(const GridFunction& x1, const GridFunction& x2,
                            double tol_zero) {
    x1.validate();
    x2.validate();
    if (!(x1.grid == x2.grid))
        throw DomainError("check_separation: trajectories live on different grids");
    const double d0 = x1[0] - x2[0];
    if (d0 == 0.0)
        throw DomainError(
            "check_separation: identical initial values; no sign to preserve");
    const double s = d0 > 0.0 ? 1.0 : -1.0;

    SignReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x1.size(); ++i) {
        if (x1.is_singular_node(i) || x2.is_singular_node(i)) continue;
        ++rep.checked;
        const double gap = s * (x1[i] - x2[i]);
        if (gap < rep.min_value) {
            rep.min_value = gap;
            rep.argmin = x1.grid.node(i);
        }
    }
    rep.verdict = classify(rep.min_value, tol_zero, 0.0);
    return rep;
}

SignReport check_nonlinear_positive(
    const std::function<double(double, double)>& f, double x_a, double alpha,
    const UniformGrid& grid, double tol_zero) {
    if (!f)
        throw DomainError("check_nonlinear_positive: right-hand side is empty");
    if (!(x_a > 0.0))
        throw DomainError(
            "check_nonlinear_positive: initial value must be positive, got " +
            std::to_string(x_a));
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double t = grid.node(i);
        const double v = f(t, 0.0);
        if (!(std::abs(v) == 0.0)) {
            SignReport rep;
            rep.verdict = Verdict::violated;
            rep.min_value = v;
            rep.argmin = t;
            rep.checked = i + 1;
            rep.note = "f(t, 0) = " + std::to_string(v) + " at t = " +
                       std::to_string(t) + "; zero-state precondition broken";
            return rep;
        }
    }
    const solvers::NonlinearIVP p{alpha, grid.a, grid.b, x_a, f};
    return check_positive(solvers::predictor_corrector(p, grid.n), tol_zero);
}

double bernoulli_margin(double alpha, double lambda, double t) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("bernoulli_margin: order must lie in (0,1], got " +
                          std::to_string(alpha));
    if (!(t >= 0.0))
        throw DomainError("bernoulli_margin: t must be nonnegative, got " +
                          std::to_string(t));
    if (t == 0.0) return 0.0;
    const double z = lambda * std::pow(t, alpha);
    const double linear = z * special::reciprocal_gamma(alpha + 1.0);
    try {
        return special::mittag_leffler(alpha, 1.0, z) - linear - 1.0;
    } catch (const OverflowError&) {
        // the curved side left double range; the linear side did not
        return std::numeric_limits<double>::infinity();
    }
}

BernoulliSweepReport bernoulli_sweep(const SweepRange& alphas,
                                     const SweepRange& lambdas,
                                     const SweepRange& ts) {
    const std::size_t na = range_count("bernoulli_sweep", alphas);
    const std::size_t nl = range_count("bernoulli_sweep", lambdas);
    const std::size_t nt = range_count("bernoulli_sweep", ts);

    std::vector<BernoulliSweepReport> slot(na * nl);
    parallel_for(na * nl, [&](std::size_t j) {
        const double alpha = range_value(alphas, j / nl);
        const double lambda = range_value(lambdas, j % nl);
        BernoulliSweepReport local;
        local.worst_margin = std::numeric_limits<double>::infinity();
        local.alpha = alpha;
        local.lambda = lambda;
        for (std::size_t k = 0; k < nt; ++k) {
            const double t = range_value(ts, k);
            const double m = bernoulli_margin(alpha, lambda, t);
            ++local.evaluated;
            if (std::isinf(m)) ++local.overflowed;
            if (m < local.worst_margin) {
                local.worst_margin = m;
                local.t = t;
            }
        }
        slot[j] = local;
    });

    BernoulliSweepReport worst = slot[0];
    worst.evaluated = 0;
    worst.overflowed = 0;
    for (const auto& local : slot) {
        worst.evaluated += local.evaluated;
        worst.overflowed += local.overflowed;
        if (local.worst_margin < worst.worst_margin) {
            worst.worst_margin = local.worst_margin;
            worst.alpha = local.alpha;
            worst.lambda = local.lambda;
            worst.t = local.t;
        }
    }
    return worst;
}

} // namespace fracsign::sign_analysis
