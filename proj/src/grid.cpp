#include "fracsign/grid.hpp"

#include "fracsign/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace fracsign {

UniformGrid::UniformGrid(double a_, double b_, std::size_t n_) : a(a_), b(b_), n(n_) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("grid: requires finite a < b");
    if (n < 2) throw DomainError("grid: requires at least 2 nodes");
}

std::size_t UniformGrid::index_of(double t) const {
    double r = (t - a) / h();
    if (r <= 0.0) return 0;
    std::size_t i = static_cast<std::size_t>(std::llround(r));
    return (i >= n) ? n - 1 : i;
}

GridFunction::GridFunction(const UniformGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != grid.n)
        throw DomainError("grid function: value count " + std::to_string(values.size()) +
                          " does not match node count " + std::to_string(grid.n));
}

bool GridFunction::is_singular_node(std::size_t i) const {
    return (singular == SingularEnd::left && i == 0) ||
           (singular == SingularEnd::right && i == grid.n - 1);
}

void GridFunction::validate() const {
    if (values.size() != grid.n) throw DomainError("grid function: value/node count mismatch");
    if (singular != SingularEnd::none && !(sigma > -1.0 && sigma < 0.0))
        throw DomainError("grid function: singular order must lie in (-1,0), got " +
                          std::to_string(sigma));
    for (std::size_t i = 0; i < values.size(); ++i) {
        // the singular slot holds the coefficient, which must be finite too
        if (!std::isfinite(values[i]))
            throw DomainError("grid function: non-finite value at node " + std::to_string(i));
    }
}

GridFunction GridFunction::constant(const UniformGrid& g, double c) {
    GridFunction f(g);
    for (auto& v : f.values) v = c;
    return f;
}

GridFunction GridFunction::sample(const UniformGrid& g, const std::function<double(double)>& fn) {
    GridFunction f(g);
    for (std::size_t i = 0; i < g.n; ++i) f.values[i] = fn(g.node(i));
    return f;
}

} // namespace fracsign
