#include "celldyn/velocity.hpp"

#include <cmath>
#include <thread>

namespace celldyn {

namespace {

// Integer window geometry for quadrature anchored at a cell center:
// row_half[|dj|] is the largest |di| with |(di*dx, dj*dx)| <= R (-1: empty row).
struct WindowTable {
    int W = 0;
    std::vector<int> row_half;
};

WindowTable make_window_table(const DomainGrid& g, double R) {
    WindowTable wt;
    wt.W = g.dim == 2 ? int(std::floor(R / g.dx)) + 1 : 0;
    wt.row_half.assign(wt.W + 1, -1);
    const double R2 = R * R;
    const int di_cap = int(std::floor(R / g.dx)) + 1;
    for (int dj = 0; dj <= wt.W; ++dj) {
        const double zy = dj * g.dx;
        const double zy2 = g.dim == 2 ? zy * zy : 0.0;
        int h = -1;
        for (int di = 0; di <= di_cap; ++di) {
            const double zx = di * g.dx;
            if (zx * zx + zy2 <= R2) h = di;
            else break;
        }
        wt.row_half[dj] = h;
    }
    return wt;
}

struct RowSums {
    double s0 = 0.0;  // sum of rho over the row window
    double s1 = 0.0;  // sum of di * rho (signed integer offsets)
};

// Mirror-paired row accumulation: +di and -di taps are combined before being
// added, so that mirrored states produce exactly negated moments. Off-grid
// taps contribute exact zeros to keep the pairing structure.
inline RowSums row_sums_fast(const double* row, int i, int h) {
    RowSums r;
    r.s0 = row[i];
    for (int d = 1; d <= h; ++d) {
        const double a = row[i + d];
        const double b = row[i - d];
        r.s0 += (a + b);
        r.s1 += d * (a - b);
    }
    return r;
}

inline RowSums row_sums_checked(const double* row, int i, int h, int nx) {
    RowSums r;
    r.s0 = row[i];
    for (int d = 1; d <= h; ++d) {
        const double a = (i + d < nx) ? row[i + d] : 0.0;
        const double b = (i - d >= 0) ? row[i - d] : 0.0;
        r.s0 += (a + b);
        r.s1 += d * (a - b);
    }
    return r;
}

// sum of k(z) * rho over window cells for k(z) = ±z, evaluation point exactly
// at cell center (ic, jc). Returns the raw sum (no cell-volume factor).
Vec2 paired_moment_sum(const GridField& rho, const DomainGrid& g, int ic, int jc,
                       const WindowTable& wt, double sign) {
    double m1x = 0.0;  // sum di * rho
    double m1y = 0.0;  // sum dj * rho
    const int nx = g.nx, ny = g.ny;

    auto row_at = [&](int j, int h) -> RowSums {
        if (j < 0 || j >= ny || h < 0) return {};
        if (ic - h >= 0 && ic + h < nx) return row_sums_fast(rho.row(j), ic, h);
        return row_sums_checked(rho.row(j), ic, h, nx);
    };

    {
        const RowSums c = row_at(jc, wt.row_half[0]);
        m1x += c.s1;
    }
    for (int dj = 1; dj <= wt.W; ++dj) {
        const int h = wt.row_half[dj];
        if (h < 0) continue;
        const RowSums p = row_at(jc + dj, h);
        const RowSums q = row_at(jc - dj, h);
        m1x += (p.s1 + q.s1);
        m1y += dj * (p.s0 - q.s0);
    }
    return {sign * (m1x * g.dx), sign * (m1y * g.dx)};
}

inline Vec2 rho_weighted(const InteractionKernel& kern, const Vec2& z, double rho) {
    const Vec2 k = kern.eval_profile(z);
    return {k.x * rho, k.y * rho};
}

// General window sum: arbitrary profile/neighborhood, evaluation point offset
// (ex, ey) from the anchor cell center.
Vec2 generic_window_sum(const GridField& rho, const DomainGrid& g, const InteractionKernel& kern,
                        int ia, int ja, double ex, double ey, const Vec2& taxis) {
    const int W = int(std::floor(kern.radius / g.dx)) + 2;
    Vec2 sum{};
    const int dj_lo = g.dim == 2 ? -W : 0;
    const int dj_hi = g.dim == 2 ? W : 0;
    for (int dj = dj_lo; dj <= dj_hi; ++dj) {
        const int j = ja + dj;
        if (j < 0 || j >= g.ny) continue;
        const double zy = g.dim == 2 ? dj * g.dx - ey : 0.0;
        const double* row = rho.row(j);
        for (int di = -W; di <= W; ++di) {
            const int i = ia + di;
            if (i < 0 || i >= g.nx) continue;
            const Vec2 z{di * g.dx - ex, zy};
            if (!in_neighborhood(kern, z, taxis)) continue;
            sum += rho_weighted(kern, z, row[i]);
        }
    }
    return sum;
}

Vec2 continuous_sum(const HybridMeasure& m, const InteractionKernel& kern, int ia, int ja,
                    double ex, double ey, const Vec2& taxis, const WindowTable* wt) {
    const bool signed_identity =
        kern.profile == KernelProfile::Aggregation || kern.profile == KernelProfile::Repulsion;
    if (ex == 0.0 && ey == 0.0 && signed_identity && kern.neighborhood == Neighborhood::Ball) {
        const double sign = kern.profile == KernelProfile::Aggregation ? 1.0 : -1.0;
        if (wt) return paired_moment_sum(m.density, m.grid, ia, ja, *wt, sign);
        const WindowTable local = make_window_table(m.grid, kern.radius);
        return paired_moment_sum(m.density, m.grid, ia, ja, local, sign);
    }
    return generic_window_sum(m.density, m.grid, kern, ia, ja, ex, ey, taxis);
}

Vec2 velocity_impl(const Vec2& x, int ia, int ja, double ex, double ey, const HybridMeasure& m,
                   const InteractionKernel& kern, const Vec2& taxis, const WindowTable* wt) {
    Vec2 v = taxis;
    if (m.u < 1.0) {
        const Vec2 s = atomic_interaction_sum(x, m.atoms, kern, taxis);
        v += (1.0 - m.u) * s;
    }
    if (m.u > 0.0) {
        const Vec2 s = continuous_sum(m, kern, ia, ja, ex, ey, taxis, wt);
        v += (m.u * m.population * m.grid.cell_volume()) * s;
    }
    return v;
}

}  // namespace

Vec2 atomic_interaction_sum(const Vec2& x, const std::vector<Vec2>& atoms,
                            const InteractionKernel& kern, const Vec2& taxis) {
    Vec2 s{};
    for (const Vec2& a : atoms) s += eval_kernel(kern, x, a, taxis);
    return s;
}

Vec2 velocity(const Vec2& x, const HybridMeasure& m, const InteractionKernel& kern,
              const Vec2& taxis) {
    const int ia = m.grid.nearest_ix(x.x);
    const int ja = m.grid.nearest_iy(x.y);
    const Vec2 c = m.grid.center(ia, ja);
    const double ex = x.x - c.x;
    const double ey = m.grid.dim == 2 ? x.y - c.y : 0.0;
    return velocity_impl(x, ia, ja, ex, ey, m, kern, taxis, nullptr);
}

VelocityField velocity_field(const HybridMeasure& m, const InteractionKernel& kern,
                             const VectorGridField* taxis_grid, int threads,
                             const std::vector<std::uint8_t>* cell_mask) {
    const DomainGrid& g = m.grid;
    VelocityField out;
    out.on_grid = VectorGridField(g);
    out.at_atoms.resize(m.atoms.size());

    const WindowTable wt = make_window_table(g, kern.radius);

    auto eval_rows = [&](int j0, int j1) {
        for (int j = j0; j < j1; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                if (cell_mask && !(*cell_mask)[g.index(i, j)]) continue;
                Vec2 tax{};
                if (taxis_grid) tax = {taxis_grid->x.at(i, j), taxis_grid->y.at(i, j)};
                const Vec2 v = velocity_impl(g.center(i, j), i, j, 0.0, 0.0, m, kern, tax, &wt);
                out.on_grid.x.at(i, j) = v.x;
                out.on_grid.y.at(i, j) = v.y;
            }
        }
    };

    const int nthreads = std::max(1, std::min(threads, g.ny));
    if (nthreads == 1) {
        eval_rows(0, g.ny);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        const int chunk = (g.ny + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const int j0 = t * chunk;
            const int j1 = std::min(g.ny, j0 + chunk);
            if (j0 >= j1) break;
            pool.emplace_back(eval_rows, j0, j1);
        }
        for (auto& th : pool) th.join();
    }

    for (size_t h = 0; h < m.atoms.size(); ++h) {
        Vec2 tax{};
        if (taxis_grid) {
            tax.x = interp_bilinear(g, taxis_grid->x, m.atoms[h]);
            if (g.dim == 2) tax.y = interp_bilinear(g, taxis_grid->y, m.atoms[h]);
        }
        out.at_atoms[h] = velocity(m.atoms[h], m, kern, tax);
    }
    return out;
}

}  // namespace celldyn
