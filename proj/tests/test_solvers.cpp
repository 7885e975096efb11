#include "doctest.h"

#include "fracsign/errors.hpp"
#include "fracsign/frac_ops.hpp"
#include "fracsign/solvers.hpp"
#include "fracsign/special.hpp"

#include <cmath>
#include <vector>

using namespace fracsign;
using namespace fracsign::solvers;

namespace {

double sup_diff(const GridFunction& u, const GridFunction& v) {
    REQUIRE(u.size() == v.size());
    double w = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        w = std::max(w, std::abs(u[i] - v[i]));
    return w;
}

double sup_err(const GridFunction& got,
               const std::function<double(double)>& ref) {
    double w = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (got.is_singular_node(i)) continue;
        w = std::max(w, std::abs(got[i] - ref(got.grid.node(i))));
    }
    return w;
}

// Reference values computed with 50-digit arithmetic, rounded to double.
constexpr double kMl05At1 = 5.00898008076228346631;       // E_{1/2}(1)
constexpr double kMl05AtM1 = 0.4275835761558070044108;    // E_{1/2}(-1)
constexpr double kRightSpot = 3.080739656278069667172;    // 2 E_{1/2,1/2}(1/2)
constexpr double kInvSqrtPi = 0.56418958354775628695;     // 1/sqrt(pi)

} // namespace

TEST_CASE("closed-form route reproduces the exponential at order one") {
    ConstantLinearIVP p{1.0, 0.0, 1.0, 1.0, 1.0, nullptr};
    auto x = solve_vcf(p, 513);
    CHECK(sup_err(x, [](double t) { return std::exp(t); }) < 1e-10);
}

TEST_CASE("closed-form route hits the half-order growth value") {
    ConstantLinearIVP p{0.5, 0.0, 1.0, 1.0, 1.0, nullptr};
    auto x = solve_vcf(p, 257);
    CHECK(x[256] == doctest::Approx(kMl05At1).epsilon(1e-12));
    // no coefficient, no forcing: the solution is frozen at x_a
    ConstantLinearIVP q{0.5, 0.0, 1.0, 3.25, 0.0, nullptr};
    auto y = solve_vcf(q, 65);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == 3.25);
}

TEST_CASE("forced relaxation approaches its equilibrium curve") {
    // x' (order 1/2) = 1 - x, x(0) = 0 has x = 1 - E_{1/2}(-sqrt t)
    ConstantLinearIVP p{0.5, 0.0, 1.0, 0.0, -1.0, [](double) { return 1.0; }};
    auto x = solve_vcf(p, 2048);
    double w = sup_err(x, [](double t) {
        return 1.0 - special::mittag_leffler(0.5, 1.0, -std::sqrt(t));
    });
    CHECK(w < 5e-4);
    CHECK(x[0] == 0.0);
}

TEST_CASE("successive approximations match the decay value for constant coefficient") {
    VariableLinearIVP p{0.5, 0.0, 1.0, 1.0, [](double) { return -1.0; }};
    auto s = solve_resolvent(p, 257, {1e-12, 200});
    CHECK(s.x[256] == doctest::Approx(kMl05AtM1).epsilon(1e-11));
    CHECK(s.last_term < 1e-12);
    CHECK(s.levels > 10);

    // zero coefficient: one level settles it and the solution is constant
    VariableLinearIVP z{0.7, 0.0, 2.0, -4.0, [](double) { return 0.0; }};
    auto sz = solve_resolvent(z, 65);
    CHECK(sz.levels == 1);
    for (std::size_t i = 0; i < sz.x.size(); ++i) CHECK(sz.x[i] == -4.0);
}

TEST_CASE("successive approximations are exactly linear in the initial value") {
    auto g = [](double t) { return std::cos(t); };
    VariableLinearIVP p1{0.4, 0.0, 2.0, 1.0, g};
    VariableLinearIVP p7{0.4, 0.0, 2.0, -7.25, g};
    auto a1 = solve_resolvent(p1, 129, {1e-10, 120});
    auto a7 = solve_resolvent(p7, 129, {1e-10, 120});
    for (std::size_t i = 0; i < a1.x.size(); ++i)
        CHECK(a7.x[i] == -7.25 * a1.x[i]);
}

TEST_CASE("three independent linear routes agree") {
    // vcf vs series vs predictor-corrector across orders and signs
    for (double alpha : {0.3, 0.6, 0.9}) {
        for (double lambda : {-2.0, -1.0, 0.5}) {
            CAPTURE(alpha);
            CAPTURE(lambda);
            ConstantLinearIVP pv{alpha, 0.0, 1.0, 1.0, lambda, nullptr};
            auto xv = solve_vcf(pv, 1025);
            VariableLinearIVP pr{alpha, 0.0, 1.0, 1.0,
                                 [lambda](double) { return lambda; }};
            auto xr = solve_resolvent(pr, 1025, {1e-10, 250});
            NonlinearIVP pn{alpha, 0.0, 1.0, 1.0,
                            [lambda](double, double x) { return lambda * x; }};
            auto xp = predictor_corrector(pn, 1025);
            CHECK(sup_diff(xv, xr.x) < 1e-9);
            // the march's startup error dominates; it at least halves again
            // by n = 2048, which is what the acceptance gate measures
            CHECK(sup_diff(xv, xp) < 4e-3);
        }
    }
}

TEST_CASE("series and march agree for an oscillating coefficient") {
    auto g = [](double t) { return std::sin(t) - 1.0; };
    VariableLinearIVP p{0.6, 0.0, 5.0, 1.0, g};
    auto xr = solve_resolvent(p, 1025, {1e-10, 200});
    NonlinearIVP pn{0.6, 0.0, 5.0, 1.0,
                    [g](double t, double x) { return g(t) * x; }};
    auto xp = predictor_corrector(pn, 1025);
    auto xi = solve_linear_implicit(p, 1025);
    CHECK(sup_diff(xr.x, xp) < 1e-3);
    CHECK(sup_diff(xr.x, xi) < 1e-3);
}

TEST_CASE("series truncation reports are sound") {
    VariableLinearIVP p{0.5, 0.0, 1.0, 1.0, [](double) { return -1.0; }};
    auto coarse = solve_resolvent(p, 129, {1e-6, 100});
    auto fine = solve_resolvent(p, 129, {1e-13, 100});
    // dropping the tail moves the solution by no more than a few last terms
    CHECK(sup_diff(coarse.x, fine.x) < 4.0 * coarse.last_term);
    CHECK(fine.levels > coarse.levels);
}

TEST_CASE("series failure modes carry diagnostics") {
    VariableLinearIVP p{0.5, 0.0, 1.0, 1.0, [](double) { return -1.0; }};
    try {
        solve_resolvent(p, 129, {1e-10, 5});
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.levels == 5);
        CHECK(e.last_term > 1e-10);
    }
    // a strongly growing solution on a long window leaves double range
    VariableLinearIVP q{0.3, 0.0, 5.0, 1.0, [](double) { return 9.0; }};
    CHECK_THROWS_AS(solve_resolvent(q, 129, {1e-10, 5000}), OverflowError);
}

TEST_CASE("implicit march rejects steps its factor cannot support") {
    VariableLinearIVP p{0.3, 0.0, 5.0, 1.0, [](double) { return 20.0; }};
    CHECK_THROWS_AS(solve_linear_implicit(p, 129), DomainError);
    // the same coefficient is fine on a short window with a denser grid
    VariableLinearIVP q{0.3, 0.0, 0.01, 1.0, [](double) { return 20.0; }};
    CHECK_NOTHROW(solve_linear_implicit(q, 1025));
}

TEST_CASE("predictor-corrector handles a genuinely nonlinear right side") {
    // x' = -x^2, x(0) = 1 on [0,1] has x = 1/(1+t)
    NonlinearIVP p{1.0, 0.0, 1.0, 1.0,
                   [](double, double x) { return -x * x; }};
    auto x = predictor_corrector(p, 1025);
    CHECK(sup_err(x, [](double t) { return 1.0 / (1.0 + t); }) < 1e-5);
}

TEST_CASE("predictor-corrector surfaces blow-up as overflow") {
    // x' = x^2, x(0) = 2 escapes at t = 1/2
    NonlinearIVP p{1.0, 0.0, 1.0, 2.0, [](double, double x) { return x * x; }};
    CHECK_THROWS_AS(predictor_corrector(p, 2048), OverflowError);
}

TEST_CASE("terminal-weight series reduces to the bare kernel for zero coefficient") {
    RightTerminalIVP p{0.5, 0.0, 1.0, 1.0, [](double) { return 0.0; }};
    auto s = solve_right_series(p, 257);
    CHECK(s.levels == 1);
    CHECK(s.x.singular == SingularEnd::right);
    CHECK(s.x.sigma == doctest::Approx(-0.5).epsilon(1e-15));
    // x(t) = (b-t)^{-1/2}/Gamma(1/2); the b slot stores the coefficient
    CHECK(s.x[256] == doctest::Approx(kInvSqrtPi).epsilon(1e-14));
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
        double t = s.x.grid.node(i);
        w = std::max(w, std::abs(s.x[i] - kInvSqrtPi / std::sqrt(1.0 - t)));
    }
    CHECK(w < 1e-11);
}

TEST_CASE("terminal-weight series hits the constant-coefficient spot value") {
    RightTerminalIVP p{0.5, 0.0, 1.0, 1.0, [](double) { return 1.0; }};
    auto s = solve_right_series(p, 1025, {1e-12, 100});
    const std::size_t i = s.x.grid.index_of(0.75);
    CHECK(s.x.grid.node(i) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(s.x[i] == doctest::Approx(kRightSpot).epsilon(1e-4));
}

TEST_CASE("terminal weight of the computed solution returns the terminal datum") {
    for (double alpha : {0.3, 0.5, 0.8}) {
        CAPTURE(alpha);
        RightTerminalIVP p{alpha, 0.0, 1.0, 1.0,
                           [](double t) { return std::sin(t); }};
        auto s = solve_right_series(p, 1025, {1e-12, 120});
        auto w = frac_ops::right_frac_integral(s.x, 1.0 - alpha);
        CHECK(w.singular == SingularEnd::none);
        CHECK(std::abs(w[w.size() - 1] - 1.0) < 1e-12);
    }
}

TEST_CASE("terminal series is odd in the terminal datum") {
    auto g = [](double t) { return std::cos(2.0 * t); };
    RightTerminalIVP pp{0.4, 0.0, 1.0, 1.0, g};
    RightTerminalIVP pm{0.4, 0.0, 1.0, -1.0, g};
    auto sp = solve_right_series(pp, 257, {1e-11, 100});
    auto sm = solve_right_series(pm, 257, {1e-11, 100});
    for (std::size_t i = 0; i < sp.x.size(); ++i) CHECK(sm.x[i] == -sp.x[i]);
}

TEST_CASE("iterated kernels: first two levels in closed form") {
    // constant coefficient: k_2(t,s) = g^2 (t-s)^{2a-1} / Gamma(2a), exactly
    VariableLinearIVP p{0.6, 0.0, 1.0, 1.0, [](double) { return 0.7; }};
    auto ks = build_kernels(p, 257, 2);
    const double inv_g12 = special::reciprocal_gamma(1.2);
    for (std::size_t m : {std::size_t{0}, std::size_t{100}, std::size_t{255}}) {
        for (std::size_t i = m + 1; i < 257; i += 31) {
            const double ts = ks.grid.node(i) - ks.grid.node(m);
            CHECK(ks.k(1, i, m) ==
                  doctest::Approx(0.7 * std::pow(ts, -0.4) *
                                  special::reciprocal_gamma(0.6))
                      .epsilon(1e-12));
            CHECK(ks.k(2, i, m) ==
                  doctest::Approx(0.49 * std::pow(ts, 0.2) * inv_g12)
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("iterated kernels: flag follows the accumulated power") {
    // 2a-1 < 0 keeps level two singular; the coefficient slot carries it
    VariableLinearIVP p{0.3, 0.0, 1.0, 1.0, [](double) { return 1.0; }};
    auto ks = build_kernels(p, 129, 2);
    const auto& col = ks.levels[1][10];
    CHECK(col.singular == SingularEnd::left);
    CHECK(col.sigma == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(ks.k(2, 10, 10) ==
          doctest::Approx(special::reciprocal_gamma(0.6)).epsilon(1e-12));

    // at a = 1/2 the power lands on zero and level two is a constant
    VariableLinearIVP q{0.5, 0.0, 1.0, 1.0, [](double) { return 2.0; }};
    auto kh = build_kernels(q, 129, 2);
    CHECK(kh.levels[1][5].singular == SingularEnd::none);
    CHECK(kh.k(2, 77, 5) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("iterated kernels at order one are the classical ones") {
    // g = 1: k_j(t,s) = (t-s)^{j-1}/(j-1)!
    VariableLinearIVP p{1.0, 0.0, 1.0, 1.0, [](double) { return 1.0; }};
    auto ks = build_kernels(p, 257, 3);
    for (std::size_t i = 40; i < 257; i += 29) {
        const double ts = ks.grid.node(i) - ks.grid.node(3);
        CHECK(ks.k(1, i, 3) == 1.0);
        CHECK(ks.k(2, i, 3) == doctest::Approx(ts).epsilon(1e-12));
        CHECK(ks.k(3, i, 3) == doctest::Approx(ts * ts / 2.0).epsilon(1e-10));
    }
}

TEST_CASE("kernel stack accessor validates its indices") {
    VariableLinearIVP p{0.5, 0.0, 1.0, 1.0, [](double) { return 1.0; }};
    auto ks = build_kernels(p, 65, 2);
    CHECK_THROWS_AS(ks.k(0, 1, 0), DomainError);
    CHECK_THROWS_AS(ks.k(3, 1, 0), DomainError);
    CHECK_THROWS_AS(ks.k(1, 3, 7), DomainError);
    CHECK_THROWS_AS(ks.k(1, 65, 0), DomainError);
    CHECK_THROWS_AS(ks.k(1, 64, 64), DomainError);
    CHECK_THROWS_AS(build_kernels(p, 4096, 2), DomainError);
}

TEST_CASE("solver argument validation") {
    CHECK_THROWS_AS(solve_vcf({1.5, 0.0, 1.0, 1.0, 1.0, nullptr}, 65),
                    DomainError);
    CHECK_THROWS_AS(
        solve_resolvent({0.0, 0.0, 1.0, 1.0, [](double) { return 1.0; }}, 65),
        DomainError);
    CHECK_THROWS_AS(
        solve_resolvent({0.5, 0.0, 1.0, 1.0, nullptr}, 65), DomainError);
    // the terminal problem needs the order strictly inside (0,1)
    CHECK_THROWS_AS(
        solve_right_series({1.0, 0.0, 1.0, 1.0, [](double) { return 0.0; }},
                           65),
        DomainError);
    CHECK_THROWS_AS(predictor_corrector({0.5, 0.0, 1.0, 1.0, nullptr}, 65),
                    DomainError);
    // sampled coefficients must be plain samples, not flagged
    UniformGrid g(0.0, 1.0, 65);
    GridFunction flagged(g);
    flagged.singular = SingularEnd::left;
    flagged.sigma = -0.5;
    flagged.values.assign(65, 1.0);
    CHECK_THROWS_AS(solve_resolvent(0.5, flagged, 1.0), DomainError);
    CHECK_THROWS_AS(solve_linear_implicit(0.5, flagged, 1.0), DomainError);
}
