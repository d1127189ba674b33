#pragma once

#include <string>

#include "celldyn/grid.hpp"
#include "celldyn/measure.hpp"

namespace celldyn {

enum class TaxisKind { None, Gradient, NonlocalGradient };

/// Chemical concentration c_t with reaction-diffusion dynamics
///   dc/dt = div(D grad c) + alpha * N * mu_t - gamma * c
/// on the simulation box with zero-flux boundaries. D is diagonal.
struct ChemicalField {
    DomainGrid grid;
    GridField c;
    double diff_x = 1.0;
    double diff_y = 1.0;
    double alpha = 0.0;
    double gamma = 0.0;
    TaxisKind taxis = TaxisKind::None;
    double chi = 1.0;          // taxis sensitivity
    double sense_radius = 0.1; // r of the nonlocal gradient

    void validate() const;
};

/// One time step: backward Euler for diffusion and decay (unconditionally
/// stable, positivity preserving), explicit source. The atomic part of the
/// source is deposited by bilinear splatting, the continuous part cell-wise;
/// the total deposit integrates to alpha * N * dt exactly.
void step_chemical(ChemicalField& chem, const HybridMeasure& m, double dt);

/// chi * grad(c) by centered differences, one-sided at the boundary.
/// Requires taxis kind Gradient.
VectorGridField taxis_field(const ChemicalField& chem);

/// Spherical-average nonlocal gradient at distance r:
///   (d / (r |dB_1|)) * contour integral of sigma * c(x + sigma r).
/// d=1 uses the two endpoint directions; d=2 a 32-direction trapezoidal rule
/// with bilinear sampling. Throws OutOfDomainError if a sample leaves the box.
Vec2 nonlocal_gradient(const ChemicalField& chem, const Vec2& x, double r);

/// Taxis field for any configured kind. Near-boundary nonlocal samples are
/// evenly reflected into the box, consistent with the zero-flux boundary.
VectorGridField evaluate_taxis(const ChemicalField& chem);

TaxisKind parse_taxis_kind(const std::string& name);
std::string to_string(TaxisKind k);

}  // namespace celldyn
