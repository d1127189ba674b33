#include "celldyn/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "celldyn/errors.hpp"
#include "celldyn/numerics.hpp"

namespace celldyn {

void atom_step(SimState& state, const VelocityField& vel, double dt) {
    const DomainGrid& g = state.measure.grid;
    auto& atoms = state.measure.atoms;
    for (size_t h = 0; h < atoms.size(); ++h) {
        Vec2 p = atoms[h] + dt * vel.at_atoms[h];
        p.x = std::clamp(p.x, g.lower.x, g.upper.x);
        if (g.dim == 2) p.y = std::clamp(p.y, g.lower.y, g.upper.y);
        atoms[h] = p;
    }
}

void atom_step(SimState& state, double dt) {
    const VectorGridField* taxis = nullptr;
    VectorGridField tf;
    if (state.chem && state.chem->taxis != TaxisKind::None) {
        tf = evaluate_taxis(*state.chem);
        taxis = &tf;
    }
    // Only the atom velocities are needed here.
    std::vector<std::uint8_t> none(size_t(state.measure.grid.cells()), 0);
    const VelocityField vel = velocity_field(state.measure, state.kern, taxis, 1, &none);
    atom_step(state, vel, dt);
}

namespace {

inline double face_u(const GridField& v, int i0, int j0, int i1, int j1) {
    return 0.5 * (v.at(i0, j0) + v.at(i1, j1));
}

// Sum of outgoing face speeds of cell (i, j); boundary faces carry the cell's
// own velocity. dt * outflow_sum / dx is the upwind update coefficient whose
// bound governs stability and positivity.
double cell_outflow_sum(const DomainGrid& g, const GridField& vx, const GridField& vy, int i,
                        int j) {
    const double ue = i + 1 < g.nx ? face_u(vx, i, j, i + 1, j) : vx.at(i, j);
    const double uw = i > 0 ? face_u(vx, i - 1, j, i, j) : vx.at(i, j);
    double out = std::max(ue, 0.0) - std::min(uw, 0.0);
    if (g.dim == 2) {
        const double un = j + 1 < g.ny ? face_u(vy, i, j, i, j + 1) : vy.at(i, j);
        const double us = j > 0 ? face_u(vy, i, j - 1, i, j) : vy.at(i, j);
        out += std::max(un, 0.0) - std::min(us, 0.0);
    }
    return out;
}

}  // namespace

double density_step(SimState& state, const VelocityField& vel, double dt) {
    HybridMeasure& m = state.measure;
    const DomainGrid& g = m.grid;
    const GridField& vx = vel.on_grid.x;
    const GridField& vy = vel.on_grid.y;
    GridField& rho = m.density;

    GridField fx(g.nx + 1, g.ny);  // F_{i-1/2, j} at fx(i, j), i = 0..nx
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            double f;
            if (i == 0) {
                const double u = vx.at(0, j);
                f = std::min(u, 0.0) * rho.at(0, j);  // outflow only
            } else if (i == g.nx) {
                const double u = vx.at(g.nx - 1, j);
                f = std::max(u, 0.0) * rho.at(g.nx - 1, j);
            } else {
                const double u = face_u(vx, i - 1, j, i, j);
                f = std::max(u, 0.0) * rho.at(i - 1, j) + std::min(u, 0.0) * rho.at(i, j);
            }
            fx.at(i, j) = f;
        }
    }

    GridField fy;
    if (g.dim == 2) {
        fy = GridField(g.nx, g.ny + 1);  // G_{i, j-1/2} at fy(i, j), j = 0..ny
        for (int j = 0; j <= g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                double f;
                if (j == 0) {
                    const double u = vy.at(i, 0);
                    f = std::min(u, 0.0) * rho.at(i, 0);
                } else if (j == g.ny) {
                    const double u = vy.at(i, g.ny - 1);
                    f = std::max(u, 0.0) * rho.at(i, g.ny - 1);
                } else {
                    const double u = face_u(vy, i, j - 1, i, j);
                    f = std::max(u, 0.0) * rho.at(i, j - 1) + std::min(u, 0.0) * rho.at(i, j);
                }
                fy.at(i, j) = f;
            }
        }
    }

    // Hard stability check on the applied outflow coefficients.
    const double lam = dt / g.dx;
    double max_coef = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (rho.at(i, j) <= 0.0) continue;
            max_coef = std::max(max_coef, lam * cell_outflow_sum(g, vx, vy, i, j));
        }
    if (max_coef > 1.0 + 1e-9)
        throw CflViolationError("density_step: dt * max|v| exceeds dx (coefficient " +
                                std::to_string(max_coef) + ")");

    double outflow = 0.0;  // in units of the rho integral
    const double face_scale = dt * (g.dim == 2 ? g.dx : 1.0);
    for (int j = 0; j < g.ny; ++j) {
        double* r = rho.row(j);
        for (int i = 0; i < g.nx; ++i) {
            double div = fx.at(i + 1, j) - fx.at(i, j);
            if (g.dim == 2) div += fy.at(i, j + 1) - fy.at(i, j);
            r[i] -= lam * div;
        }
        outflow += face_scale * (fx.at(g.nx, j) - fx.at(0, j));
    }
    if (g.dim == 2)
        for (int i = 0; i < g.nx; ++i)
            outflow += face_scale * (fy.at(i, g.ny) - fy.at(i, 0));

    return outflow;
}

double density_step(SimState& state, double dt) {
    const VectorGridField* taxis = nullptr;
    VectorGridField tf;
    if (state.chem && state.chem->taxis != TaxisKind::None) {
        tf = evaluate_taxis(*state.chem);
        taxis = &tf;
    }
    const auto mask = support_mask(state.measure.grid, state.measure.density);
    const VelocityField vel = velocity_field(state.measure, state.kern, taxis, 1, &mask);
    return density_step(state, vel, dt);
}

std::vector<std::uint8_t> support_mask(const DomainGrid& g, const GridField& rho) {
    std::vector<std::uint8_t> mask(size_t(g.cells()), 0);
    double maxr = 0.0;
    for (double v : rho.data) maxr = std::max(maxr, v);
    const double thresh = 1e-16 * maxr;
    if (maxr <= 0.0) return mask;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (rho.at(i, j) <= thresh) continue;
            mask[g.index(i, j)] = 1;
            if (i > 0) mask[g.index(i - 1, j)] = 1;
            if (i + 1 < g.nx) mask[g.index(i + 1, j)] = 1;
            if (g.dim == 2) {
                if (j > 0) mask[g.index(i, j - 1)] = 1;
                if (j + 1 < g.ny) mask[g.index(i, j + 1)] = 1;
            }
        }
    return mask;
}

Simulator::Simulator(SimState init, StepControl ctrl) : Simulator(std::move(init), ctrl, Options()) {}

Simulator::Simulator(SimState init, StepControl ctrl, Options opt)
    : state_(std::move(init)), ctrl_(ctrl), opt_(opt) {
    if (!(ctrl_.cfl > 0.0 && ctrl_.cfl <= 1.0))
        throw ValidationError("StepControl: CFL number must be in (0, 1]");
    if (!(ctrl_.dt_max > 0.0)) throw ValidationError("StepControl: dt_max must be positive");
    state_.measure.validate();
    state_.kern.check_hypotheses();
    if (state_.chem) state_.chem->validate();
    initial_probability_ = total_probability(state_.measure);
    stats_.min_density_seen = state_.measure.density.data.empty()
                                  ? 0.0
                                  : *std::min_element(state_.measure.density.data.begin(),
                                                      state_.measure.density.data.end());
}

double Simulator::choose_dt(const VelocityField& vel, const std::vector<std::uint8_t>& mask,
                            double t_limit) const {
    const DomainGrid& g = state_.measure.grid;
    double dt = std::min(ctrl_.dt_max, t_limit - state_.t);

    double max_out = 0.0;  // max per-cell outflow face-speed sum over masked cells
    if (state_.measure.u > 0.0) {
        const GridField& vx = vel.on_grid.x;
        const GridField& vy = vel.on_grid.y;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (!mask[g.index(i, j)]) continue;
                max_out = std::max(max_out, cell_outflow_sum(g, vx, vy, i, j));
            }
    }
    for (const Vec2& v : vel.at_atoms) max_out = std::max(max_out, std::abs(v.x) + std::abs(v.y));

    if (max_out > 0.0) dt = std::min(dt, ctrl_.cfl * g.dx / max_out);
    return dt;
}

void Simulator::check_finite() const {
    for (const Vec2& a : state_.measure.atoms)
        if (!std::isfinite(a.x) || !std::isfinite(a.y))
            throw SolverError("NaN in atom positions at t=" + std::to_string(state_.t));
    for (double v : state_.measure.density.data)
        if (!std::isfinite(v)) throw SolverError("NaN in density at t=" + std::to_string(state_.t));
    if (state_.chem)
        for (double v : state_.chem->c.data)
            if (!std::isfinite(v))
                throw SolverError("NaN in chemical field at t=" + std::to_string(state_.t));
}

double Simulator::advance(double t_limit) {
    HybridMeasure& m = state_.measure;
    const DomainGrid& g = m.grid;
    const bool move_density = m.u > 0.0;

    VectorGridField taxis;
    const VectorGridField* taxis_ptr = nullptr;
    if (state_.chem && state_.chem->taxis != TaxisKind::None) {
        taxis = evaluate_taxis(*state_.chem);
        taxis_ptr = &taxis;
    }
    if (opt_.external_drift.x != 0.0 || opt_.external_drift.y != 0.0) {
        if (!taxis_ptr) taxis = VectorGridField(g);
        for (double& v : taxis.x.data) v += opt_.external_drift.x;
        if (g.dim == 2)
            for (double& v : taxis.y.data) v += opt_.external_drift.y;
        taxis_ptr = &taxis;
    }

    std::vector<std::uint8_t> mask;
    if (move_density) mask = support_mask(g, m.density);
    else mask.assign(size_t(g.cells()), 0);

    const VelocityField vel = velocity_field(m, state_.kern, taxis_ptr, opt_.threads, &mask);
    const double dt = choose_dt(vel, mask, t_limit);

    if (move_density) {
        const double before = m.density_integral();
        const double out = density_step(state_, vel, dt);
        if (opt_.sigma > 0.0) {
            GridField rhs = m.density;
            solve_helmholtz_noflux(g, 1.0, dt * opt_.sigma, g.dim == 2 ? dt * opt_.sigma : 0.0,
                                   m.density, rhs);
        }
        const double after = m.density_integral();
        stats_.boundary_outflow += out;
        stats_.max_mass_residual =
            std::max(stats_.max_mass_residual, std::abs(after - before + out));
        for (double v : m.density.data) stats_.min_density_seen = std::min(stats_.min_density_seen, v);
    }
    atom_step(state_, vel, dt);
    if (state_.chem) step_chemical(*state_.chem, m, dt);

    for (const Vec2& v : vel.at_atoms)
        stats_.max_speed_seen = std::max(stats_.max_speed_seen, v.norm());

    state_.t += dt;
    ++stats_.steps;
    check_finite();
    stats_.max_prob_drift = std::max(stats_.max_prob_drift,
                                     std::abs(total_probability(m) - initial_probability_));
    return dt;
}

RunResult Simulator::run(const std::vector<double>& snapshot_times) {
    const auto wall0 = std::chrono::steady_clock::now();
    RunResult out;
    auto emit = [&]() {
        Snapshot s;
        s.t = state_.t;
        s.measure = state_.measure;
        if (state_.chem) s.chem_c = state_.chem->c;
        out.snapshots.push_back(std::move(s));
    };

    size_t next = 0;
    while (next < snapshot_times.size() && snapshot_times[next] <= state_.t + 1e-12) {
        emit();
        ++next;
    }
    const double eps = 1e-12 * std::max(1.0, ctrl_.t_max);
    while (state_.t < ctrl_.t_max - eps) {
        const double target =
            next < snapshot_times.size() ? std::min(snapshot_times[next], ctrl_.t_max) : ctrl_.t_max;
        advance(target);
        if (state_.t >= target - eps) {
            state_.t = target;  // land exactly on the event time
            while (next < snapshot_times.size() && snapshot_times[next] <= state_.t + eps) {
                emit();
                ++next;
            }
        }
    }
    stats_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    out.stats = stats_;
    return out;
}

}  // namespace celldyn
