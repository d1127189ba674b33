#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "celldyn/chemical.hpp"
#include "celldyn/kernel.hpp"
#include "celldyn/measure.hpp"
#include "celldyn/velocity.hpp"

namespace celldyn {

struct StepControl {
    double dt_max = 0.02;
    double cfl = 0.5;     // in (0, 1]
    double t_max = 20.0;
};

struct SimState {
    double t = 0.0;
    HybridMeasure measure;
    std::optional<ChemicalField> chem;
    InteractionKernel kern;
};

struct RunStats {
    long steps = 0;
    double max_mass_residual = 0.0;   // per-step interior density mass defect
    double boundary_outflow = 0.0;    // density mass that left through the boundary
    double max_prob_drift = 0.0;      // |total_probability - initial| over the run
    double min_density_seen = 0.0;
    double max_speed_seen = 0.0;
    double wall_seconds = 0.0;
};

struct Snapshot {
    double t = 0.0;
    HybridMeasure measure;
    std::optional<GridField> chem_c;
};

struct RunResult {
    std::vector<Snapshot> snapshots;
    RunStats stats;
};

/// Explicit Euler update of the atom positions with the given velocity field;
/// atoms leaving the box are clamped to the boundary.
void atom_step(SimState& state, const VelocityField& vel, double dt);
void atom_step(SimState& state, double dt);  // evaluates the field itself

/// Conservative first-order upwind update of the density. Face velocities
/// average the adjacent cell-center values; boundary faces admit outflow but
/// no inflow. Returns the probability mass that left through the boundary.
/// Throws CflViolationError if any cell's outflow coefficient exceeds one.
double density_step(SimState& state, const VelocityField& vel, double dt);
double density_step(SimState& state, double dt);

/// Cells within one cell of the density support (relative threshold
/// 1e-16 * max); the transport stencil never consumes velocities elsewhere.
std::vector<std::uint8_t> support_mask(const DomainGrid& g, const GridField& rho);

/// Operator-split integrator for the coupled system: per step (velocity
/// frozen at step start) taxis field -> hybrid velocity field -> density
/// upwind step -> atom Euler step -> chemical step. The zero-weight density
/// is left untouched when u == 0.
class Simulator {
public:
    struct Options {
        double sigma = 0.0;       // random-motility diffusion applied to the density
        int threads = 1;
        Vec2 external_drift{0.0, 0.0};  // constant drift added to the taxis term
    };

    Simulator(SimState init, StepControl ctrl, Options opt);
    Simulator(SimState init, StepControl ctrl);

    /// Advances by one adaptive step, not beyond t_limit. Returns the dt taken.
    double advance(double t_limit);

    /// Runs to t_max, emitting snapshots at the given times (must be sorted).
    RunResult run(const std::vector<double>& snapshot_times);

    const SimState& state() const { return state_; }
    SimState& state() { return state_; }
    const RunStats& stats() const { return stats_; }

private:
    double choose_dt(const VelocityField& vel, const std::vector<std::uint8_t>& mask,
                     double t_limit) const;
    void check_finite() const;

    SimState state_;
    StepControl ctrl_;
    Options opt_;
    RunStats stats_;
    double initial_probability_ = 1.0;
};

}  // namespace celldyn
