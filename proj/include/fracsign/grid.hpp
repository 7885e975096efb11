#pragma once

#include <cstddef>
#include <functional>
#include <vector>

// Uniform grids on [a,b] and sampled functions on them, with an optional
// endpoint-singularity flag for functions behaving like c*(distance)^sigma,
// sigma in (-1,0), at one endpoint.

namespace fracsign {

struct UniformGrid {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 2; // node count, >= 2

    UniformGrid() = default;
    UniformGrid(double a_, double b_, std::size_t n_); // throws DomainError on bad shape

    double h() const { return (b - a) / static_cast<double>(n - 1); }
    double node(std::size_t i) const { return a + static_cast<double>(i) * h(); }

    // Index of the node nearest to t (t assumed within [a,b] up to roundoff).
    std::size_t index_of(double t) const;

    bool operator==(const UniformGrid&) const = default;
};

// Which endpoint, if any, carries the singular factor.
enum class SingularEnd { none, left, right };

// Sampled function.  When `singular != none`, the function behaves like
// c * (t-a)^sigma (left) or c * (b-t)^sigma (right) near that endpoint; the
// value slot at the singular node stores the coefficient c, never infinity.
// All other slots hold plain finite samples f(t_i).
struct GridFunction {
    UniformGrid grid;
    std::vector<double> values;
    SingularEnd singular = SingularEnd::none;
    double sigma = 0.0; // in (-1,0) when singular != none

    GridFunction() = default;
    explicit GridFunction(const UniformGrid& g) : grid(g), values(g.n, 0.0) {}
    GridFunction(const UniformGrid& g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    // True if node i is the singular endpoint node.
    bool is_singular_node(std::size_t i) const;

    // Throws DomainError if the shape or flag invariants are broken
    // (non-finite regular values, sigma out of (-1,0), size mismatch).
    void validate() const;

    static GridFunction constant(const UniformGrid& g, double c);
    static GridFunction sample(const UniformGrid& g, const std::function<double(double)>& f);
};

} // namespace fracsign
