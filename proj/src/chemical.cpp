#include "celldyn/chemical.hpp"

#include <cmath>

#include "celldyn/errors.hpp"
#include "celldyn/numerics.hpp"

namespace celldyn {

void ChemicalField::validate() const {
    std::string problems;
    if (!(diff_x > 0.0) || (grid.dim == 2 && !(diff_y > 0.0)))
        problems += "diffusion tensor must have positive eigenvalues; ";
    if (alpha < 0.0) problems += "alpha must be >= 0; ";
    if (gamma < 0.0) problems += "gamma must be >= 0; ";
    if (c.nx != grid.nx || c.ny != grid.ny) problems += "concentration shape does not match grid; ";
    for (double v : c.data)
        if (!(v >= 0.0)) { problems += "concentration must be nonnegative; "; break; }
    if (!problems.empty()) throw ValidationError("ChemicalField: " + problems);
}

void step_chemical(ChemicalField& chem, const HybridMeasure& m, double dt) {
    if (!(dt > 0.0)) throw ValidationError("step_chemical: dt must be positive");
    const DomainGrid& g = chem.grid;

    // Source alpha * N * mu: each atom carries rate (1-u)*alpha, splatted
    // bilinearly; the continuous part deposits u*alpha*N*rho_hat per cell.
    GridField rhs = chem.c;
    if (chem.alpha > 0.0) {
        GridField source(g);
        if (m.u < 1.0) {
            const double w = (1.0 - m.u) * chem.alpha;
            for (const Vec2& a : m.atoms) splat_point(g, source, a, w);
        }
        if (m.u > 0.0) {
            const double s = m.u * chem.alpha * m.population;
            for (size_t k = 0; k < source.data.size(); ++k) source.data[k] += s * m.density.data[k];
        }
        for (size_t k = 0; k < rhs.data.size(); ++k) rhs.data[k] += dt * source.data[k];
    }

    const double a = 1.0 + chem.gamma * dt;
    solve_helmholtz_noflux(g, a, dt * chem.diff_x, g.dim == 2 ? dt * chem.diff_y : 0.0, chem.c,
                           rhs);
}

VectorGridField taxis_field(const ChemicalField& chem) {
    const DomainGrid& g = chem.grid;
    const GridField& c = chem.c;
    VectorGridField out(g);
    const double inv2 = chem.chi / (2.0 * g.dx);
    const double inv1 = chem.chi / g.dx;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double tx;
            if (i == 0)
                tx = g.nx > 1 ? inv1 * (c.at(1, j) - c.at(0, j)) : 0.0;
            else if (i == g.nx - 1)
                tx = inv1 * (c.at(i, j) - c.at(i - 1, j));
            else
                tx = inv2 * (c.at(i + 1, j) - c.at(i - 1, j));
            out.x.at(i, j) = tx;
            if (g.dim == 2) {
                double ty;
                if (j == 0)
                    ty = g.ny > 1 ? inv1 * (c.at(i, 1) - c.at(i, 0)) : 0.0;
                else if (j == g.ny - 1)
                    ty = inv1 * (c.at(i, j) - c.at(i, j - 1));
                else
                    ty = inv2 * (c.at(i, j + 1) - c.at(i, j - 1));
                out.y.at(i, j) = ty;
            }
        }
    }
    return out;
}

namespace {

constexpr int kCircleDirections = 32;

// Evenly reflect a coordinate into [lo, hi].
double reflect_into(double s, double lo, double hi) {
    if (s >= lo && s <= hi) return s;
    const double span = hi - lo;
    double t = std::fmod(s - lo, 2.0 * span);
    if (t < 0.0) t += 2.0 * span;
    return t <= span ? lo + t : hi - (t - span);
}

Vec2 nonlocal_gradient_impl(const ChemicalField& chem, const Vec2& x, double r, bool reflect) {
    const DomainGrid& g = chem.grid;
    auto sample = [&](Vec2 p) -> double {
        if (!g.contains(p)) {
            if (!reflect)
                throw OutOfDomainError("nonlocal_gradient: sampling circle exits the grid");
            p.x = reflect_into(p.x, g.lower.x, g.upper.x);
            if (g.dim == 2) p.y = reflect_into(p.y, g.lower.y, g.upper.y);
        }
        return interp_bilinear(g, chem.c, p);
    };

    if (g.dim == 1) {
        const double cp = sample({x.x + r, 0.0});
        const double cm = sample({x.x - r, 0.0});
        return {(cp - cm) / (2.0 * r), 0.0};
    }

    // d/(r |dB_1|) * integral over the unit circle, trapezoidal in Q
    // directions: prefactor 2/(r Q).
    Vec2 acc{};
    for (int q = 0; q < kCircleDirections; ++q) {
        const double th = 2.0 * M_PI * q / kCircleDirections;
        const Vec2 sigma{std::cos(th), std::sin(th)};
        const double cv = sample(x + r * sigma);
        acc += cv * sigma;
    }
    return (2.0 / (r * kCircleDirections)) * acc;
}

}  // namespace

Vec2 nonlocal_gradient(const ChemicalField& chem, const Vec2& x, double r) {
    if (!(r > 0.0)) throw ValidationError("nonlocal_gradient: r must be positive");
    return nonlocal_gradient_impl(chem, x, r, false);
}

VectorGridField evaluate_taxis(const ChemicalField& chem) {
    if (chem.taxis == TaxisKind::Gradient) return taxis_field(chem);
    VectorGridField out(chem.grid);
    if (chem.taxis == TaxisKind::None) return out;
    const DomainGrid& g = chem.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 t =
                chem.chi * nonlocal_gradient_impl(chem, g.center(i, j), chem.sense_radius, true);
            out.x.at(i, j) = t.x;
            out.y.at(i, j) = t.y;
        }
    return out;
}

TaxisKind parse_taxis_kind(const std::string& name) {
    if (name == "none") return TaxisKind::None;
    if (name == "gradient") return TaxisKind::Gradient;
    if (name == "nonlocal") return TaxisKind::NonlocalGradient;
    throw ParseError("unknown taxis kind '" + name + "'");
}

std::string to_string(TaxisKind k) {
    switch (k) {
        case TaxisKind::None: return "none";
        case TaxisKind::Gradient: return "gradient";
        case TaxisKind::NonlocalGradient: return "nonlocal";
    }
    return "?";
}

}  // namespace celldyn
