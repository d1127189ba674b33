#include "celldyn/particle_mc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "celldyn/errors.hpp"
#include "celldyn/measure.hpp"
#include "celldyn/numerics.hpp"
#include "celldyn/transport.hpp"
#include "celldyn/velocity.hpp"

namespace celldyn {

namespace counter_rng {

namespace {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
}  // namespace

std::uint64_t hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                   std::uint64_t lane) {
    std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ull);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    h = splitmix64(h ^ lane);
    return h;
}

double uniform01(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                 std::uint64_t lane) {
    // (0, 1): 53 mantissa bits plus a half-ulp offset so log() never sees 0
    return double(hash(seed, a, b, c, lane) >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

Vec2 gaussian_pair(std::uint64_t seed, std::uint64_t realization, std::uint64_t particle,
                   std::uint64_t step) {
    const double u1 = uniform01(seed, realization, particle, step, 0);
    const double u2 = uniform01(seed, realization, particle, step, 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

}  // namespace counter_rng

namespace {
// Distinct stream tags so initial sampling never collides with step noise.
constexpr std::uint64_t kInitTag = 0xfeedfacecafef00dull;
}  // namespace

ParticleEnsemble make_point_ensemble(int dim, int n_particles, int n_realizations, double sigma,
                                     std::uint64_t seed, const Vec2& start) {
    if (n_particles < 1 || n_realizations < 1)
        throw ValidationError("ParticleEnsemble: M >= 1 and N >= 1 required");
    ParticleEnsemble e;
    e.dim = dim;
    e.n_particles = n_particles;
    e.n_realizations = n_realizations;
    e.sigma = sigma;
    e.seed = seed;
    e.positions.assign(size_t(n_particles) * n_realizations, start);
    return e;
}

ParticleEnsemble make_gaussian_ensemble(int dim, int n_particles, int n_realizations, double sigma,
                                        std::uint64_t seed, const Vec2& center, double width) {
    ParticleEnsemble e = make_point_ensemble(dim, n_particles, n_realizations, sigma, seed, center);
    for (int r = 0; r < n_realizations; ++r)
        for (int p = 0; p < n_particles; ++p) {
            const Vec2 g = counter_rng::gaussian_pair(seed ^ kInitTag, r, p, 0);
            Vec2& pos = e.at(r, p);
            pos.x += width * g.x;
            if (dim == 2) pos.y += width * g.y;
        }
    return e;
}

void sde_step(ParticleEnsemble& ens, const InteractionKernel* kern,
              const std::function<Vec2(const Vec2&)>& taxis, double dt, int threads) {
    const double noise_scale = ens.sigma > 0.0 ? std::sqrt(2.0 * ens.sigma * dt) : 0.0;
    const std::uint64_t step = ens.step_count;

    // Drift accumulation mirrors the Eulerian atom step exactly: taxis plus
    // atomic_interaction_sum over the frozen positions of this step.
    auto run_range = [&](int r0, int r1) {
        std::vector<Vec2> drift(size_t(ens.n_particles));
        std::vector<Vec2> frozen(size_t(ens.n_particles));
        for (int r = r0; r < r1; ++r) {
            for (int p = 0; p < ens.n_particles; ++p) frozen[size_t(p)] = ens.at(r, p);
            for (int p = 0; p < ens.n_particles; ++p) {
                const Vec2 tax = taxis ? taxis(frozen[size_t(p)]) : Vec2{};
                Vec2 v = tax;
                if (kern) v += atomic_interaction_sum(frozen[size_t(p)], frozen, *kern, tax);
                drift[size_t(p)] = v;
            }
            for (int p = 0; p < ens.n_particles; ++p) {
                Vec2 np = frozen[size_t(p)] + dt * drift[size_t(p)];
                if (noise_scale > 0.0) {
                    const Vec2 g = counter_rng::gaussian_pair(ens.seed, r, p, step);
                    np.x += noise_scale * g.x;
                    if (ens.dim == 2) np.y += noise_scale * g.y;
                }
                ens.at(r, p) = np;
            }
        }
    };

    const int nthreads = std::max(1, std::min(threads, ens.n_realizations));
    if (nthreads == 1) {
        run_range(0, ens.n_realizations);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (ens.n_realizations + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const int r0 = t * chunk;
            const int r1 = std::min(ens.n_realizations, r0 + chunk);
            if (r0 >= r1) break;
            pool.emplace_back(run_range, r0, r1);
        }
        for (auto& th : pool) th.join();
    }
    ++ens.step_count;
}

GridField empirical_density(const ParticleEnsemble& ens, const DomainGrid& grid) {
    GridField hist(grid);
    long inside = 0;
    for (const Vec2& p : ens.positions) {
        if (p.x < grid.lower.x || p.x >= grid.upper.x) continue;
        if (grid.dim == 2 && (p.y < grid.lower.y || p.y >= grid.upper.y)) continue;
        const int i = grid.cell_ix(p.x);
        const int j = grid.cell_iy(p.y);
        hist.at(i, j) += 1.0;
        ++inside;
    }
    if (inside == 0) throw ZeroDensityError("empirical_density: no positions inside the grid");
    const double scale = 1.0 / (double(inside) * grid.cell_volume());
    for (double& v : hist.data) v *= scale;
    return hist;
}

Cdf1d Cdf1d::from_samples(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    std::vector<double> w(samples.size(), 1.0 / double(samples.size()));
    return from_weighted_points(std::move(samples), std::move(w));
}

Cdf1d Cdf1d::from_weighted_points(std::vector<double> points, std::vector<double> weights) {
    if (points.empty() || points.size() != weights.size())
        throw ValidationError("Cdf1d: need matching nonempty points/weights");
    std::vector<size_t> order(points.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return points[a] < points[b]; });
    Cdf1d d;
    d.linear_ = false;
    double total = 0.0;
    for (double w : weights) total += w;
    double cum = 0.0;
    for (size_t k : order) {
        cum += weights[k] / total;
        if (!d.xs_.empty() && d.xs_.back() == points[k]) {
            d.cum_.back() = cum;
        } else {
            d.xs_.push_back(points[k]);
            d.cum_.push_back(cum);
        }
    }
    d.cum_.back() = 1.0;
    return d;
}

Cdf1d Cdf1d::from_grid_density(double lo, double dx, const std::vector<double>& density) {
    Cdf1d d;
    d.linear_ = true;
    double total = 0.0;
    for (double v : density) total += v;
    if (!(total > 0.0)) throw ZeroDensityError("Cdf1d: grid density integrates to zero");
    d.xs_.reserve(density.size() + 1);
    d.cum_.reserve(density.size() + 1);
    d.xs_.push_back(lo);
    d.cum_.push_back(0.0);
    double cum = 0.0;
    for (size_t k = 0; k < density.size(); ++k) {
        cum += density[k] / total;
        d.xs_.push_back(lo + double(k + 1) * dx);
        d.cum_.push_back(cum);
    }
    d.cum_.back() = 1.0;
    return d;
}

double Cdf1d::eval_right(double x) const {
    if (x < xs_.front()) return 0.0;
    if (x >= xs_.back()) return 1.0;
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const size_t hi = size_t(it - xs_.begin());  // first breakpoint > x
    if (!linear_) return hi == 0 ? 0.0 : cum_[hi - 1];
    // linear between breakpoints
    const size_t lo_idx = hi - 1;
    const double t = (x - xs_[lo_idx]) / (xs_[hi] - xs_[lo_idx]);
    return cum_[lo_idx] + t * (cum_[hi] - cum_[lo_idx]);
}

double wasserstein1_1d(const Cdf1d& a, const Cdf1d& b) {
    std::vector<double> xs;
    xs.reserve(a.breakpoints().size() + b.breakpoints().size());
    xs.insert(xs.end(), a.breakpoints().begin(), a.breakpoints().end());
    xs.insert(xs.end(), b.breakpoints().begin(), b.breakpoints().end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double total = 0.0;
    for (size_t k = 0; k + 1 < xs.size(); ++k) {
        const double u = xs[k], w = xs[k + 1];
        const double width = w - u;
        if (width <= 0.0) continue;
        // F_a - F_b is linear on the open segment; endpoint limits:
        const double du = a.eval_right(u) - b.eval_right(u);
        const double mid = a.eval_right(0.5 * (u + w)) - b.eval_right(0.5 * (u + w));
        const double dw = 2.0 * mid - du;  // left limit at w from linearity
        if (du == 0.0 && dw == 0.0) continue;
        if ((du >= 0.0) == (dw >= 0.0)) {
            total += 0.5 * (std::abs(du) + std::abs(dw)) * width;
        } else {
            total += 0.5 * width * (du * du + dw * dw) / (std::abs(du) + std::abs(dw));
        }
    }
    return total;
}

double wasserstein1_1d(std::vector<double> samples_a, std::vector<double> samples_b) {
    return wasserstein1_1d(Cdf1d::from_samples(std::move(samples_a)),
                           Cdf1d::from_samples(std::move(samples_b)));
}

double sliced_wasserstein(const std::vector<Vec2>& pts_a, const std::vector<double>& wts_a,
                          const std::vector<Vec2>& pts_b, const std::vector<double>& wts_b,
                          int directions) {
    double acc = 0.0;
    std::vector<double> pa(pts_a.size()), pb(pts_b.size());
    for (int q = 0; q < directions; ++q) {
        const double th = M_PI * q / directions;
        const Vec2 dir{std::cos(th), std::sin(th)};
        for (size_t k = 0; k < pts_a.size(); ++k) pa[k] = dot(pts_a[k], dir);
        for (size_t k = 0; k < pts_b.size(); ++k) pb[k] = dot(pts_b[k], dir);
        acc += wasserstein1_1d(Cdf1d::from_weighted_points(pa, wts_a),
                               Cdf1d::from_weighted_points(pb, wts_b));
    }
    return acc / directions;
}

ValidateReport validate_against_pde(const ValidateConfig& cfg) {
    ValidateReport report;
    const DomainGrid& g = cfg.grid;

    // Eulerian reference: u = 1 continuous state with the sigma diffusion
    // sub-step, fixed dt for comparability with the SDE.
    HybridMeasure m;
    m.grid = g;
    m.u = 1.0;
    m.population = cfg.n_particles;
    m.density = GridField(g);
    if (cfg.init == ValidateConfig::Init::Point) {
        // bilinear deposit keeps the delta's center of mass exact
        splat_point(g, m.density, cfg.init_center, 1.0);
    } else {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const Vec2 c = g.center(i, j);
                const double r2 = (c - cfg.init_center).norm2();
                m.density.at(i, j) = std::exp(-r2 / (2.0 * cfg.init_width * cfg.init_width));
            }
    }
    m = normalize_density(std::move(m));

    SimState st;
    st.measure = std::move(m);
    st.kern = cfg.kern;
    if (!cfg.use_kernel) {
        // kernel with support below the cell width: exactly zero velocity
        st.kern = InteractionKernel{};
        st.kern.radius = 0.4 * g.dx;
    }

    Simulator::Options opt;
    opt.sigma = cfg.sigma;
    opt.threads = cfg.threads;
    opt.external_drift = cfg.const_drift;
    StepControl ctrl;
    ctrl.dt_max = cfg.dt;
    ctrl.cfl = 1.0;
    ctrl.t_max = cfg.t_final;
    Simulator sim(std::move(st), ctrl, opt);
    RunResult pde = sim.run({cfg.t_final});
    const GridField& pde_density = pde.snapshots.back().measure.density;

    Cdf1d pde_cdf = Cdf1d::from_grid_density(g.lower.x, g.dx,
                                             std::vector<double>(pde_density.data.begin(),
                                                                 pde_density.data.end()));

    for (int M : cfg.ensemble_sizes) {
        const auto wall0 = std::chrono::steady_clock::now();
        ParticleEnsemble ens =
            cfg.init == ValidateConfig::Init::Point
                ? make_point_ensemble(g.dim, cfg.n_particles, M, cfg.sigma, cfg.seed,
                                      cfg.init_center)
                : make_gaussian_ensemble(g.dim, cfg.n_particles, M, cfg.sigma, cfg.seed,
                                         cfg.init_center, cfg.init_width);
        const std::vector<Vec2> start = ens.positions;

        std::function<Vec2(const Vec2&)> taxis;
        if (cfg.const_drift.x != 0.0 || cfg.const_drift.y != 0.0)
            taxis = [d = cfg.const_drift](const Vec2&) { return d; };

        const long steps = std::lround(cfg.t_final / cfg.dt);
        for (long s = 0; s < steps; ++s)
            sde_step(ens, cfg.use_kernel ? &cfg.kern : nullptr, taxis, cfg.dt, cfg.threads);

        double msd = 0.0;
        for (size_t k = 0; k < ens.positions.size(); ++k)
            msd += (ens.positions[k] - start[k]).norm2();
        msd /= double(ens.positions.size());

        double w1;
        if (g.dim == 1) {
            std::vector<double> xs(ens.positions.size());
            for (size_t k = 0; k < xs.size(); ++k) xs[k] = ens.positions[k].x;
            w1 = wasserstein1_1d(Cdf1d::from_samples(std::move(xs)), pde_cdf);
        } else {
            std::vector<Vec2> cells;
            std::vector<double> wts;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    if (pde_density.at(i, j) > 0.0) {
                        cells.push_back(g.center(i, j));
                        wts.push_back(pde_density.at(i, j));
                    }
            std::vector<double> ones(ens.positions.size(), 1.0);
            w1 = sliced_wasserstein(ens.positions, ones, cells, wts);
        }

        ValidateRow row;
        row.t = cfg.t_final;
        row.ensemble_size = M;
        row.w1 = w1;
        row.msd = msd;
        row.runtime_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace celldyn
