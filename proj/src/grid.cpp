#include "celldyn/grid.hpp"

#include <cmath>

namespace celldyn {

static void check_square(double wx, double wy, double dx) {
    if (std::abs(wx - wy) > 1e-12 * std::max(wx, wy))
        throw ValidationError("DomainGrid: cells must be square (cell width " + std::to_string(wx) +
                              " vs " + std::to_string(wy) + ")");
    if (!(dx > 0.0)) throw ValidationError("DomainGrid: cell width must be positive");
}

DomainGrid DomainGrid::make_1d(double lo, double hi, int cells) {
    if (cells < 1) throw ValidationError("DomainGrid: cells_per_axis must be positive");
    if (!(hi > lo)) throw ValidationError("DomainGrid: upper must exceed lower");
    DomainGrid g;
    g.dim = 1;
    g.lower = {lo, 0.0};
    g.upper = {hi, 0.0};
    g.nx = cells;
    g.ny = 1;
    g.dx = (hi - lo) / cells;
    return g;
}

DomainGrid DomainGrid::make_2d(Vec2 lo, Vec2 hi, int cells_x, int cells_y) {
    if (cells_x < 1 || cells_y < 1) throw ValidationError("DomainGrid: cells_per_axis must be positive");
    if (!(hi.x > lo.x) || !(hi.y > lo.y)) throw ValidationError("DomainGrid: upper must exceed lower componentwise");
    DomainGrid g;
    g.dim = 2;
    g.lower = lo;
    g.upper = hi;
    g.nx = cells_x;
    g.ny = cells_y;
    g.dx = (hi.x - lo.x) / cells_x;
    check_square(g.dx, (hi.y - lo.y) / cells_y, g.dx);
    return g;
}

double interp_bilinear(const DomainGrid& g, const GridField& f, const Vec2& p) {
    // Work in center coordinates: s in [0, nx-1] maps onto cell centers.
    double sx = (p.x - g.lower.x) / g.dx - 0.5;
    sx = std::clamp(sx, 0.0, double(g.nx - 1));
    int i0 = std::min(int(sx), g.nx - 2 >= 0 ? g.nx - 2 : 0);
    double fx = sx - i0;
    if (g.nx == 1) { i0 = 0; fx = 0.0; }

    if (g.dim == 1) {
        const double a = f.at(i0, 0);
        const double b = f.at(std::min(i0 + 1, g.nx - 1), 0);
        return a + fx * (b - a);
    }

    double sy = (p.y - g.lower.y) / g.dx - 0.5;
    sy = std::clamp(sy, 0.0, double(g.ny - 1));
    int j0 = std::min(int(sy), g.ny - 2 >= 0 ? g.ny - 2 : 0);
    double fy = sy - j0;
    if (g.ny == 1) { j0 = 0; fy = 0.0; }

    const int i1 = std::min(i0 + 1, g.nx - 1);
    const int j1 = std::min(j0 + 1, g.ny - 1);
    const double v00 = f.at(i0, j0), v10 = f.at(i1, j0);
    const double v01 = f.at(i0, j1), v11 = f.at(i1, j1);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

}  // namespace celldyn
