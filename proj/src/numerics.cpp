#include "celldyn/numerics.hpp"

#include <cmath>

#include "celldyn/errors.hpp"

namespace celldyn {

namespace {

// y = (a I - div(b grad)) x with zero-flux boundaries (missing faces carry no
// flux), in conservative divergence form.
void apply_helmholtz(const DomainGrid& g, double a, double bx, double by, const GridField& x,
                     GridField& y) {
    const double cx = bx / (g.dx * g.dx);
    const double cy = by / (g.dx * g.dx);
    for (int j = 0; j < g.ny; ++j) {
        const double* xr = x.row(j);
        double* yr = y.row(j);
        const double* xs = j > 0 ? x.row(j - 1) : nullptr;
        const double* xn = j + 1 < g.ny ? x.row(j + 1) : nullptr;
        for (int i = 0; i < g.nx; ++i) {
            double lap = 0.0;
            if (i > 0) lap += cx * (xr[i - 1] - xr[i]);
            if (i + 1 < g.nx) lap += cx * (xr[i + 1] - xr[i]);
            if (g.dim == 2) {
                if (xs) lap += cy * (xs[i] - xr[i]);
                if (xn) lap += cy * (xn[i] - xr[i]);
            }
            yr[i] = a * xr[i] - lap;
        }
    }
}

double dot(const GridField& a, const GridField& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.data.size(); ++k) s += a.data[k] * b.data[k];
    return s;
}

}  // namespace

void solve_helmholtz_noflux(const DomainGrid& g, double a, double bx, double by, GridField& x,
                            const GridField& rhs, double tol, int max_iter) {
    if (bx == 0.0 && by == 0.0) {
        // Pure reaction solve.
        for (size_t k = 0; k < rhs.data.size(); ++k) x.data[k] = rhs.data[k] / a;
        return;
    }
    GridField r(rhs.nx, rhs.ny), p(rhs.nx, rhs.ny), ap(rhs.nx, rhs.ny);
    apply_helmholtz(g, a, bx, by, x, ap);
    for (size_t k = 0; k < r.data.size(); ++k) r.data[k] = rhs.data[k] - ap.data[k];
    p = r;
    double rr = dot(r, r);
    const double target = tol * std::max(std::sqrt(dot(rhs, rhs)), 1e-300);
    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) <= target) return;
        apply_helmholtz(g, a, bx, by, p, ap);
        const double alpha = rr / dot(p, ap);
        for (size_t k = 0; k < x.data.size(); ++k) x.data[k] += alpha * p.data[k];
        for (size_t k = 0; k < r.data.size(); ++k) r.data[k] -= alpha * ap.data[k];
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (size_t k = 0; k < p.data.size(); ++k) p.data[k] = r.data[k] + beta * p.data[k];
    }
    if (std::sqrt(rr) > target)
        throw SolverError("implicit diffusion solve did not converge (residual " +
                          std::to_string(std::sqrt(rr)) + ")");
}

void splat_point(const DomainGrid& g, GridField& field, const Vec2& p, double weight) {
    const double w_density = weight / g.cell_volume();

    // Per-axis index/weight pairs with out-of-range weight folded inward.
    auto axis_weights = [](double s, int n, int& i0, int& i1, double& w0, double& w1) {
        // s: continuous center coordinate (0 at first center, n-1 at last)
        if (s <= 0.0) { i0 = i1 = 0; w0 = 1.0; w1 = 0.0; return; }
        if (s >= n - 1) { i0 = i1 = n - 1; w0 = 1.0; w1 = 0.0; return; }
        i0 = int(s);
        i1 = i0 + 1;
        w1 = s - i0;
        w0 = 1.0 - w1;
    };

    int i0, i1, j0 = 0, j1 = 0;
    double wx0, wx1, wy0 = 1.0, wy1 = 0.0;
    axis_weights((p.x - g.lower.x) / g.dx - 0.5, g.nx, i0, i1, wx0, wx1);
    if (g.dim == 2) axis_weights((p.y - g.lower.y) / g.dx - 0.5, g.ny, j0, j1, wy0, wy1);

    field.at(i0, j0) += w_density * wx0 * wy0;
    field.at(i1, j0) += w_density * wx1 * wy0;
    if (g.dim == 2) {
        field.at(i0, j1) += w_density * wx0 * wy1;
        field.at(i1, j1) += w_density * wx1 * wy1;
    }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < n; ++k) {
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace celldyn
