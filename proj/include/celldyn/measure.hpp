#pragma once

#include <vector>

#include "celldyn/grid.hpp"
#include "celldyn/vec.hpp"

namespace celldyn {

/// Hybrid probability measure
///   mu = (1-u) * (1/N) * sum_h delta_{x_h}  +  u * rho_hat * Lebesgue,
/// with the density rho_hat stored as cell-centered averages.
///
/// `atoms` holds N positions for u < 1; for u == 1 the atom list may also be
/// empty (purely continuous state) or carry N zero-weight marker positions.
struct HybridMeasure {
    DomainGrid grid;
    std::vector<Vec2> atoms;
    GridField density;
    double u = 0.0;
    int population = 1;  // N, the number of cells represented

    /// Integral of rho_hat over the grid (cell value times cell volume).
    double density_integral() const;

    /// Throws ValidationError when a type invariant is violated.
    /// Normalization is checked to 1e-10 whenever u > 0.
    void validate() const;
};

/// (1-u) * |atoms| / N + u * integral(rho_hat).
double total_probability(const HybridMeasure& m);

/// Mass measure m_t(E) = (1-u) * card(E ∩ atoms) + u * N * integral_E rho_hat,
/// with exact cell-clipping quadrature for the continuous part and half-open
/// box membership for atoms.
double mass(const HybridMeasure& m, const Region& e);

/// Rescales the density so it integrates to one; atoms and u are unchanged.
/// No-op when u == 0. Throws ZeroDensityError if u > 0 and the integral is 0.
HybridMeasure normalize_density(HybridMeasure m);

}  // namespace celldyn
