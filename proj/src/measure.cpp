#include "celldyn/measure.hpp"

#include <cmath>
#include <string>

#include "celldyn/errors.hpp"

namespace celldyn {

double HybridMeasure::density_integral() const {
    double s = 0.0;
    for (double v : density.data) s += v;
    return s * grid.cell_volume();
}

void HybridMeasure::validate() const {
    std::string problems;
    if (u < 0.0 || u > 1.0) problems += "u must be in [0,1]; ";
    if (population < 1) problems += "population N must be >= 1; ";
    if (density.nx != grid.nx || density.ny != grid.ny) problems += "density shape does not match grid; ";
    if (!(u == 1.0 && atoms.empty()) && int(atoms.size()) != population)
        problems += "atom count must equal N (got " + std::to_string(atoms.size()) + "); ";
    for (double v : density.data) {
        if (!(v >= 0.0)) { problems += "density must be nonnegative everywhere; "; break; }
    }
    if (u > 0.0 && std::abs(density_integral() - 1.0) > 1e-10)
        problems += "density must integrate to 1 when u > 0 (got " + std::to_string(density_integral()) + "); ";
    if (!problems.empty()) throw ValidationError("HybridMeasure: " + problems);
}

double total_probability(const HybridMeasure& m) {
    const double atomic = m.u < 1.0 ? (1.0 - m.u) * double(m.atoms.size()) / double(m.population) : 0.0;
    const double continuous = m.u > 0.0 ? m.u * m.density_integral() : 0.0;
    return atomic + continuous;
}

double mass(const HybridMeasure& m, const Region& e) {
    double out = 0.0;
    if (m.u < 1.0) {
        int inside = 0;
        for (const Vec2& a : m.atoms)
            if (e.contains(a, m.grid.dim)) ++inside;
        out += (1.0 - m.u) * inside;
    }
    if (m.u > 0.0) {
        // Clip the iteration to the cells the box can touch.
        const DomainGrid& g = m.grid;
        const int i0 = std::clamp(int(std::floor((e.lower.x - g.lower.x) / g.dx)), 0, g.nx - 1);
        const int i1 = std::clamp(int(std::ceil((e.upper.x - g.lower.x) / g.dx)), 0, g.nx);
        int j0 = 0, j1 = 1;
        if (g.dim == 2) {
            j0 = std::clamp(int(std::floor((e.lower.y - g.lower.y) / g.dx)), 0, g.ny - 1);
            j1 = std::clamp(int(std::ceil((e.upper.y - g.lower.y) / g.dx)), 0, g.ny);
        }
        double integral = 0.0;
        for (int j = j0; j < j1; ++j)
            for (int i = i0; i < i1; ++i)
                integral += m.density.at(i, j) * e.cell_overlap(g, i, j);
        out += m.u * m.population * integral;
    }
    return out;
}

HybridMeasure normalize_density(HybridMeasure m) {
    if (m.u == 0.0) return m;
    const double s = m.density_integral();
    if (s <= 0.0) throw ZeroDensityError("normalize_density: density integral is zero with u > 0");
    const double inv = 1.0 / s;
    for (double& v : m.density.data) v *= inv;
    return m;
}

}  // namespace celldyn
