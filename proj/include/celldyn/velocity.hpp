#pragma once

#include <cstdint>
#include <vector>

#include "celldyn/grid.hpp"
#include "celldyn/kernel.hpp"
#include "celldyn/measure.hpp"

namespace celldyn {

/// Hybrid velocity field sampled at every grid cell center and at every atom.
struct VelocityField {
    VectorGridField on_grid;
    std::vector<Vec2> at_atoms;
};

/// Nonlocal velocity at a point:
///   v(x) = taxis + (1-u) * sum_h K(x, x_h) + u * N * integral K(x, y) rho_hat(y) dy,
/// the integral by midpoint quadrature over cells whose centers lie in U_R(x)
/// (no partial-cell clipping; centers exactly at distance R are included).
/// `taxis` is the precomputed taxis value at x (zero when chemistry is off).
Vec2 velocity(const Vec2& x, const HybridMeasure& m, const InteractionKernel& kern,
              const Vec2& taxis = {});

/// Sum over the atom list of K(x, x_h); shared by the Eulerian atom stepper
/// and the particle SDE drift so the two produce bit-identical trajectories.
Vec2 atomic_interaction_sum(const Vec2& x, const std::vector<Vec2>& atoms,
                            const InteractionKernel& kern, const Vec2& taxis = {});

/// Velocity evaluated at every cell center and atom. Results at cell centers
/// are identical to pointwise velocity() there. `taxis_grid` may be null.
/// `cell_mask`, when given, marks the cells to evaluate (others get zero);
/// the transport scheme only consumes velocities near the density support.
/// Deterministic for any thread count.
VelocityField velocity_field(const HybridMeasure& m, const InteractionKernel& kern,
                             const VectorGridField* taxis_grid = nullptr, int threads = 1,
                             const std::vector<std::uint8_t>* cell_mask = nullptr);

}  // namespace celldyn
