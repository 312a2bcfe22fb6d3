#pragma once

#include <vector>

#include "rdinv/boundary.hpp"
#include "rdinv/grid.hpp"

namespace rdinv {

/// Endpoint patterns with closed-form eigenpairs of the constant-coefficient
/// operator -(a d^2/dx^2) + q on (0,L).
enum class EigenPattern { DirichletNeumann, NeumannNeumann };

/// Maps a species' endpoint conditions onto a supported pattern.
/// Throws UnsupportedBC for Robin endpoints or other combinations.
EigenPattern classify_pattern(const BoundarySpec& bc, int species);

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> phi;  // sampled on grid nodes
};

double eigen_value(int n, EigenPattern pattern, double L, double a, double q);
double eigen_fn(int n, EigenPattern pattern, double L, double x);
double eigen_fn_d1(int n, EigenPattern pattern, double L, double x);
double eigen_fn_d2(int n, EigenPattern pattern, double L, double x);

/// n-th eigenpair (n >= 1) sampled on the grid; orthonormal in L2(0,L).
EigenPair eigenpair(int n, const Grid& grid, EigenPattern pattern, double a, double q);

}  // namespace rdinv
