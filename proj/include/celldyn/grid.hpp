#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "celldyn/errors.hpp"
#include "celldyn/vec.hpp"

namespace celldyn {

/// Uniform Cartesian grid with square cells, d = 1 or 2.
/// Scalar fields live at cell centers (cell averages).
struct DomainGrid {
    int dim = 2;
    Vec2 lower{0.0, 0.0};
    Vec2 upper{1.0, 1.0};
    int nx = 1;
    int ny = 1;  // 1 when dim == 1
    double dx = 1.0;

    static DomainGrid make_1d(double lo, double hi, int cells);
    static DomainGrid make_2d(Vec2 lo, Vec2 hi, int cells_x, int cells_y);

    int cells() const { return nx * ny; }
    double cell_volume() const { return dim == 1 ? dx : dx * dx; }
    int index(int i, int j) const { return j * nx + i; }

    Vec2 center(int i, int j) const {
        return {lower.x + (i + 0.5) * dx, dim == 1 ? 0.0 : lower.y + (j + 0.5) * dx};
    }

    bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }

    bool contains(const Vec2& p) const {
        bool ok = p.x >= lower.x && p.x <= upper.x;
        if (dim == 2) ok = ok && p.y >= lower.y && p.y <= upper.y;
        return ok;
    }

    /// Index of the cell whose center is nearest to the given coordinate,
    /// clamped to the grid.
    int nearest_ix(double px) const {
        int i = static_cast<int>(std::llround((px - lower.x) / dx - 0.5));
        return std::clamp(i, 0, nx - 1);
    }
    int nearest_iy(double py) const {
        if (dim == 1) return 0;
        int j = static_cast<int>(std::llround((py - lower.y) / dx - 0.5));
        return std::clamp(j, 0, ny - 1);
    }

    /// Index of the cell containing p (lower-closed), clamped.
    int cell_ix(double px) const {
        int i = static_cast<int>(std::floor((px - lower.x) / dx));
        return std::clamp(i, 0, nx - 1);
    }
    int cell_iy(double py) const {
        if (dim == 1) return 0;
        int j = static_cast<int>(std::floor((py - lower.y) / dx));
        return std::clamp(j, 0, ny - 1);
    }

    bool same_layout(const DomainGrid& o) const {
        return dim == o.dim && nx == o.nx && ny == o.ny && lower == o.lower && upper == o.upper;
    }
};

/// Scalar field stored row-major on a DomainGrid.
struct GridField {
    int nx = 0;
    int ny = 0;
    std::vector<double> data;

    GridField() = default;
    GridField(int nx_, int ny_, double fill = 0.0) : nx(nx_), ny(ny_), data(size_t(nx_) * ny_, fill) {}
    explicit GridField(const DomainGrid& g, double fill = 0.0) : GridField(g.nx, g.ny, fill) {}

    double& at(int i, int j) { return data[size_t(j) * nx + i]; }
    double at(int i, int j) const { return data[size_t(j) * nx + i]; }
    double* row(int j) { return data.data() + size_t(j) * nx; }
    const double* row(int j) const { return data.data() + size_t(j) * nx; }
    size_t size() const { return data.size(); }
    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

struct VectorGridField {
    GridField x;
    GridField y;

    VectorGridField() = default;
    explicit VectorGridField(const DomainGrid& g) : x(g), y(g) {}
};

/// Axis-aligned box used for mass queries. Point membership is half-open,
/// lower <= p < upper, so disjoint tilings partition mass exactly.
struct Region {
    Vec2 lower{0.0, 0.0};
    Vec2 upper{0.0, 0.0};

    bool contains(const Vec2& p, int dim) const {
        bool ok = p.x >= lower.x && p.x < upper.x;
        if (dim == 2) ok = ok && p.y >= lower.y && p.y < upper.y;
        return ok;
    }

    /// Volume of the overlap between this region and the cell (i, j).
    double cell_overlap(const DomainGrid& g, int i, int j) const {
        const double cx0 = g.lower.x + i * g.dx;
        const double ox = std::max(0.0, std::min(upper.x, cx0 + g.dx) - std::max(lower.x, cx0));
        if (g.dim == 1) return ox;
        const double cy0 = g.lower.y + j * g.dx;
        const double oy = std::max(0.0, std::min(upper.y, cy0 + g.dx) - std::max(lower.y, cy0));
        return ox * oy;
    }
};

/// Bilinear interpolation of a cell-centered field, clamped at the
/// outer half-cell margin (constant extrapolation).
double interp_bilinear(const DomainGrid& g, const GridField& f, const Vec2& p);

}  // namespace celldyn
