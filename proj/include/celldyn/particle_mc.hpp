#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "celldyn/grid.hpp"
#include "celldyn/kernel.hpp"

namespace celldyn {

/// Counter-based random stream: every draw is a pure hash of
/// (seed, realization, particle, step, lane), so ensembles are reproducible
/// for a fixed seed no matter how work is scheduled.
namespace counter_rng {
std::uint64_t hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                   std::uint64_t lane);
double uniform01(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                 std::uint64_t lane);
/// Standard normal pair (Box-Muller) for one (realization, particle, step).
Vec2 gaussian_pair(std::uint64_t seed, std::uint64_t realization, std::uint64_t particle,
                   std::uint64_t step);
}  // namespace counter_rng

/// M independent realizations of N particle positions driven by
///   dX^i = (T[c](X^i) + sum_j K(X^i, X^j)) dt + sqrt(2 sigma) dW^i.
struct ParticleEnsemble {
    int dim = 1;
    int n_particles = 1;     // N
    int n_realizations = 1;  // M
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t step_count = 0;  // drives the per-step noise streams
    std::vector<Vec2> positions;   // realization-major, size M * N

    Vec2& at(int r, int p) { return positions[size_t(r) * n_particles + p]; }
    const Vec2& at(int r, int p) const { return positions[size_t(r) * n_particles + p]; }
};

/// All realizations start from N copies of the same position.
ParticleEnsemble make_point_ensemble(int dim, int n_particles, int n_realizations, double sigma,
                                     std::uint64_t seed, const Vec2& start);

/// Initial positions drawn iid from an isotropic Gaussian.
ParticleEnsemble make_gaussian_ensemble(int dim, int n_particles, int n_realizations, double sigma,
                                        std::uint64_t seed, const Vec2& center, double width);

/// One Euler-Maruyama step (strong order 1/2). The pairwise sum runs over all
/// j including i, which is harmless under H1 (k(0) = 0). With sigma = 0 and a
/// single realization the update is bit-identical to the Eulerian atom step.
/// Realizations are advanced concurrently when threads > 1; results do not
/// depend on the thread count.
void sde_step(ParticleEnsemble& ens, const InteractionKernel* kern,
              const std::function<Vec2(const Vec2&)>& taxis, double dt, int threads = 1);

/// Normalized histogram of all M*N positions over the grid cells. Positions
/// outside the box are dropped; throws ZeroDensityError if nothing is left.
GridField empirical_density(const ParticleEnsemble& ens, const DomainGrid& grid);

/// One-dimensional distribution with an exactly integrable CDF: a step CDF
/// from (weighted) samples or a piecewise-linear CDF from a grid density.
class Cdf1d {
public:
    static Cdf1d from_samples(std::vector<double> samples);  // sorts internally
    static Cdf1d from_weighted_points(std::vector<double> points, std::vector<double> weights);
    static Cdf1d from_grid_density(double lo, double dx, const std::vector<double>& density);

    const std::vector<double>& breakpoints() const { return xs_; }
    /// F(x+) (right-continuous evaluation).
    double eval_right(double x) const;
    bool piecewise_linear() const { return linear_; }

private:
    std::vector<double> xs_;   // sorted breakpoints
    std::vector<double> cum_;  // CDF value at/after each breakpoint
    bool linear_ = false;      // linear between breakpoints (grid density)
};

/// Exact 1D Wasserstein-1 distance, the integral of |F_a - F_b|.
double wasserstein1_1d(const Cdf1d& a, const Cdf1d& b);
double wasserstein1_1d(std::vector<double> samples_a, std::vector<double> samples_b);

/// Sliced W1 for d = 2: mean of exact 1D distances over equally spaced fixed
/// projection directions.
double sliced_wasserstein(const std::vector<Vec2>& pts_a, const std::vector<double>& wts_a,
                          const std::vector<Vec2>& pts_b, const std::vector<double>& wts_b,
                          int directions = 64);

struct ValidateRow {
    double t = 0.0;
    int ensemble_size = 0;  // M
    double w1 = 0.0;
    double msd = 0.0;
    double runtime_s = 0.0;
};

struct ValidateReport {
    std::vector<ValidateRow> rows;
};

struct ValidateConfig {
    DomainGrid grid = DomainGrid::make_1d(-3.0, 3.0, 1500);
    InteractionKernel kern;
    bool use_kernel = false;
    double sigma = 0.125;
    Vec2 const_drift{0.0, 0.0};
    double t_final = 1.0;
    double dt = 1e-3;
    int n_particles = 1;
    std::vector<int> ensemble_sizes{100, 1000, 10000};
    std::uint64_t seed = 1;
    int threads = 1;

    enum class Init { Point, Gaussian } init = Init::Point;
    Vec2 init_center{0.0, 0.0};
    double init_width = 0.25;  // Gaussian std
};

/// Runs the particle ensemble and the continuous Eulerian solver (u = 1 with
/// sigma diffusion) from the same initial law and reports the W1 distance,
/// per-particle mean squared displacement and wall time for each M.
ValidateReport validate_against_pde(const ValidateConfig& cfg);

}  // namespace celldyn
