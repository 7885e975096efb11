#include "fracsign/frac_ops.hpp"

#include "fracsign/errors.hpp"
#include "fracsign/kernels.hpp"
#include "fracsign/special.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracsign::frac_ops {

namespace {

void check_integral_order(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw DomainError("fractional integral: order must lie in [0,1], got " +
                          std::to_string(alpha));
}

GridFunction reflected(const GridFunction& f) {
    GridFunction r(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) r.values[i] = f.values[f.size() - 1 - i];
    r.sigma = f.sigma;
    switch (f.singular) {
        case SingularEnd::left: r.singular = SingularEnd::right; break;
        case SingularEnd::right: r.singular = SingularEnd::left; break;
        case SingularEnd::none: r.singular = SingularEnd::none; break;
    }
    return r;
}

// Core driver: I_{a+}^alpha of a regular or singular-at-a input.
GridFunction left_integral_impl(const GridFunction& f, double alpha) {
    const std::size_t n = f.grid.n;
    const double h = f.grid.h();
    const double inv_gamma = special::reciprocal_gamma(alpha);
    const auto tw = detail::trap_weights(alpha, h, n);

    GridFunction out(f.grid);

    if (f.singular == SingularEnd::none) {
        // out_i = (1/Gamma(a)) [ sum_k w[i-k] f_k - B[i+1] f_0 ]
        const double* fv = f.values.data();
        out.values[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            double s = kernels::dot(&tw.wrev[n - 1 - i], fv, i + 1);
            s -= tw.B[i + 1] * fv[0];
            out.values[i] = inv_gamma * s;
        }
        return out;
    }

    // Singular at a: split f = c (s-a)^sigma + r. The power part has an exact
    // antiderivative at every node (power rule), and r is bounded, so the
    // product-trapezoid rule applies to it directly. r(a) is not observable
    // (node 0 stores c, not a sample), so the first panel reuses r(a+h).
    const double sigma = f.sigma;
    const double c = f.values[0];
    // sigma = order' - 1 against order 1 - order' must cancel exactly even
    // when order' itself carries rounding, so exponents within noise of zero
    // collapse onto the constant branch.
    double sig_alpha = sigma + alpha;
    if (std::abs(sig_alpha) < 1e-12) sig_alpha = 0.0;
    const double c_out =
        c * special::gamma(sigma + 1.0) * special::reciprocal_gamma(sig_alpha + 1.0);

    std::vector<double> r(n);
    for (std::size_t k = 1; k < n; ++k)
        r[k] = f.values[k] - c * std::pow(static_cast<double>(k) * h, sigma);
    r[0] = r[1];

    for (std::size_t i = 1; i < n; ++i) {
        double s = kernels::dot(&tw.wrev[n - 1 - i], r.data(), i + 1);
        s -= tw.B[i + 1] * r[0];
        out.values[i] =
            inv_gamma * s + c_out * std::pow(static_cast<double>(i) * h, sig_alpha);
    }

    if (sig_alpha < 0.0) {
        out.singular = SingularEnd::left;
        out.sigma = sig_alpha;
        out.values[0] = c_out;
    } else if (sig_alpha == 0.0) {
        out.values[0] = c_out;
    } else {
        out.values[0] = 0.0;
    }
    return out;
}

} // namespace

namespace detail {

double power_diff(double p, double r) {
    if (r <= 1.0) return std::pow(r, p);
    return -std::pow(r, p) * std::expm1(p * std::log1p(-1.0 / r));
}

TrapWeights trap_weights(double alpha, double h, std::size_t n) {
    TrapWeights tw;
    tw.h_alpha = std::pow(h, alpha);
    tw.A.assign(n + 1, 0.0);
    tw.B.assign(n + 1, 0.0);
    tw.wrev.assign(n, 0.0);
    const double ap1 = alpha + 1.0;
    for (std::size_t r = 1; r <= n; ++r) {
        double rr = static_cast<double>(r);
        double d1 = power_diff(ap1, rr); // r^(a+1) - (r-1)^(a+1)
        double d0 = power_diff(alpha, rr);
        tw.A[r] = tw.h_alpha * (d1 / ap1 - (rr - 1.0) * d0 / alpha);
        tw.B[r] = tw.h_alpha * (rr * d0 / alpha - d1 / ap1);
    }
    // w[0] = B[1]; w[d] = A[d] + B[d+1]
    tw.wrev[n - 1] = tw.B[1];
    for (std::size_t d = 1; d < n; ++d) tw.wrev[n - 1 - d] = tw.A[d] + tw.B[d + 1];
    return tw;
}

} // namespace detail

GridFunction left_frac_integral(const GridFunction& f, double alpha) {
    check_integral_order(alpha);
    f.validate();
    if (f.singular == SingularEnd::right)
        throw DomainError("left integral: input is singular at b; integral diverges there");
    if (alpha == 0.0) return f;
    return left_integral_impl(f, alpha);
}

GridFunction right_frac_integral(const GridFunction& f, double alpha) {
    check_integral_order(alpha);
    f.validate();
    if (f.singular == SingularEnd::left)
        throw DomainError("right integral: input is singular at a; integral diverges there");
    if (alpha == 0.0) return f;
    return reflected(left_frac_integral(reflected(f), alpha));
}

GridFunction caputo_left_derivative(const GridFunction& f, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("caputo derivative: order must lie in (0,1], got " +
                          std::to_string(alpha));
    f.validate();
    if (f.singular != SingularEnd::none)
        throw DomainError("caputo derivative: input must be continuous (unflagged)");

    const std::size_t n = f.grid.n;
    const double h = f.grid.h();
    GridFunction out(f.grid);

    if (alpha == 1.0) {
        out.values[0] = (f.values[1] - f.values[0]) / h;
        for (std::size_t i = 1; i + 1 < n; ++i)
            out.values[i] = (f.values[i + 1] - f.values[i - 1]) / (2.0 * h);
        out.values[n - 1] = (f.values[n - 1] - f.values[n - 2]) / h;
        return out;
    }

    // D_i = h^-alpha/Gamma(2-alpha) * sum_j (f_j - f_{j-1}) b_{i-j+1},
    // b_m = m^(1-alpha) - (m-1)^(1-alpha); stored reversed so the sum is a
    // contiguous dot product like the integral driver's.
    const double p = 1.0 - alpha;
    std::vector<double> brev(n, 0.0), df(n, 0.0);
    for (std::size_t m = 1; m < n; ++m)
        brev[n - 1 - m] = detail::power_diff(p, static_cast<double>(m));
    for (std::size_t j = 1; j < n; ++j) df[j] = f.values[j] - f.values[j - 1];

    const double scale =
        std::pow(h, -alpha) * special::reciprocal_gamma(2.0 - alpha);
    out.values[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        // sum_{j=1..i} df[j] * b_{i-j+1} = dot(brev[n-1-i ..], df[1 ..], i)
        double s = kernels::dot(&brev[n - 1 - i], df.data() + 1, i);
        out.values[i] = scale * s;
    }
    return out;
}

GridFunction rl_right_derivative(const GridFunction& f, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("rl right derivative: order must lie in (0,1], got " +
                          std::to_string(alpha));
    f.validate();
    if (f.singular == SingularEnd::left)
        throw DomainError("rl right derivative: input is singular at a");
    const std::size_t n = f.grid.n;
    if (n < 3) throw DomainError("rl right derivative: needs at least 3 nodes");
    const double h = f.grid.h();

    GridFunction g = (alpha == 1.0) ? f : right_frac_integral(f, 1.0 - alpha);

    UniformGrid trimmed(f.grid.a, f.grid.b - h, n - 1);
    GridFunction out(trimmed);
    // -d/dt of g, centered inside, one-sided at the left edge; the node at
    // b-h uses the centered stencil reaching into g(b) when that value is
    // regular, else falls back to a one-sided stencil.
    out.values[0] = -(g.values[1] - g.values[0]) / h;
    for (std::size_t i = 1; i + 1 < n - 1; ++i)
        out.values[i] = -(g.values[i + 1] - g.values[i - 1]) / (2.0 * h);
    if (n >= 3) {
        std::size_t i = n - 2; // last trimmed node
        if (g.singular == SingularEnd::none)
            out.values[i] = -(g.values[i + 1] - g.values[i - 1]) / (2.0 * h);
        else
            out.values[i] = -(g.values[i] - g.values[i - 1]) / h;
    }
    return out;
}

} // namespace fracsign::frac_ops
