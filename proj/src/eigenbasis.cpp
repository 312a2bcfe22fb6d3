#include "rdinv/eigenbasis.hpp"

#include <cmath>
#include <numbers>

#include "rdinv/errors.hpp"

namespace rdinv {

EigenPattern classify_pattern(const BoundarySpec& bc, int species) {
    const BoundaryCondition& left = bc.at(species, Endpoint::Left);
    const BoundaryCondition& right = bc.at(species, Endpoint::Right);
    if (left.kind == BcKind::Robin || right.kind == BcKind::Robin)
        throw UnsupportedBC("no closed-form eigenbasis for Robin endpoints");
    if (left.kind == BcKind::Dirichlet && right.kind == BcKind::Neumann)
        return EigenPattern::DirichletNeumann;
    if (left.kind == BcKind::Neumann && right.kind == BcKind::Neumann)
        return EigenPattern::NeumannNeumann;
    throw UnsupportedBC("unsupported endpoint pattern for the eigenbasis");
}

namespace {

double omega(int n, EigenPattern pattern, double L) {
    using std::numbers::pi;
    if (pattern == EigenPattern::DirichletNeumann) return (n - 0.5) * pi / L;
    return (n - 1.0) * pi / L;  // NeumannNeumann, n >= 1
}

}  // namespace

double eigen_value(int n, EigenPattern pattern, double L, double a, double q) {
    const double w = omega(n, pattern, L);
    return a * w * w + q;
}

double eigen_fn(int n, EigenPattern pattern, double L, double x) {
    const double w = omega(n, pattern, L);
    if (pattern == EigenPattern::DirichletNeumann) return std::sqrt(2.0 / L) * std::sin(w * x);
    if (n == 1) return std::sqrt(1.0 / L);
    return std::sqrt(2.0 / L) * std::cos(w * x);
}

double eigen_fn_d1(int n, EigenPattern pattern, double L, double x) {
    const double w = omega(n, pattern, L);
    if (pattern == EigenPattern::DirichletNeumann)
        return std::sqrt(2.0 / L) * w * std::cos(w * x);
    if (n == 1) return 0.0;
    return -std::sqrt(2.0 / L) * w * std::sin(w * x);
}

double eigen_fn_d2(int n, EigenPattern pattern, double L, double x) {
    const double w = omega(n, pattern, L);
    return -w * w * eigen_fn(n, pattern, L, x);
}

EigenPair eigenpair(int n, const Grid& grid, EigenPattern pattern, double a, double q) {
    if (n < 1) throw std::invalid_argument("eigenpair: n must be >= 1");
    EigenPair p;
    p.lambda = eigen_value(n, pattern, grid.length, a, q);
    p.phi.resize(grid.nx);
    for (int j = 0; j < grid.nx; ++j) p.phi[j] = eigen_fn(n, pattern, grid.length, grid.x(j));
    return p;
}

}  // namespace rdinv
