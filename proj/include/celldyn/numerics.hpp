#pragma once

#include <vector>

#include "celldyn/grid.hpp"
#include "celldyn/vec.hpp"

namespace celldyn {

/// Solves (a*I - div(diag(bx, by) grad)) x = rhs on the grid with zero-flux
/// boundaries, by conjugate gradients (matrix-free, SPD for a > 0, b >= 0).
/// Converges to ||r||_2 <= tol * max(||rhs||_2, tiny). Throws SolverError on
/// failure to converge.
void solve_helmholtz_noflux(const DomainGrid& g, double a, double bx, double by, GridField& x,
                            const GridField& rhs, double tol = 1e-12, int max_iter = 2000);

/// Area-weighted (bilinear) deposit of a point mass onto the 2^d cells whose
/// centers surround p, as a density increment (weight / cell volume). Weights
/// falling outside the grid are folded onto the nearest cell so the total
/// deposit is conserved exactly.
void splat_point(const DomainGrid& g, GridField& field, const Vec2& p, double weight);

/// Least-squares slope of log(y) against log(x); x, y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace celldyn
