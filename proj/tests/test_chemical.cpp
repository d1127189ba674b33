#include <cmath>
#include <random>

#include "celldyn/chemical.hpp"
#include "celldyn/config.hpp"
#include "celldyn/errors.hpp"
#include "doctest.h"

using namespace celldyn;

namespace {

ChemicalField make_chem(const DomainGrid& g, double D, double alpha, double gamma) {
    ChemicalField chem;
    chem.grid = g;
    chem.c = GridField(g);
    chem.diff_x = chem.diff_y = D;
    chem.alpha = alpha;
    chem.gamma = gamma;
    return chem;
}

HybridMeasure empty_measure(const DomainGrid& g) {
    HybridMeasure m;
    m.grid = g;
    m.u = 0.0;
    m.population = 1;
    m.atoms = {{0.5 * (g.lower.x + g.upper.x), 0.5 * (g.lower.y + g.upper.y)}};
    m.density = GridField(g);
    return m;
}

double integral(const DomainGrid& g, const GridField& f) {
    double s = 0.0;
    for (double v : f.data) s += v;
    return s * g.cell_volume();
}

}  // namespace

TEST_CASE("uniform field is a diffusion fixed point") {
    const DomainGrid g = DomainGrid::make_2d({0, 0}, {1, 1}, 40, 40);
    ChemicalField chem = make_chem(g, 0.3, 0.0, 0.0);
    chem.c.fill(2.5);
    const HybridMeasure m = empty_measure(g);
    step_chemical(chem, m, 0.05);
    for (double v : chem.c.data) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("pure decay matches the implicit update exactly") {
    const DomainGrid g = DomainGrid::make_1d(0, 1, 64);
    ChemicalField chem = make_chem(g, 1.0, 0.0, 0.7);
    chem.diff_x = chem.diff_y = 0.0;  // decay only
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(0.1, 2.0);
    GridField c0(g);
    for (double& v : c0.data) v = d(rng);
    chem.c = c0;
    const double dt = 0.01;
    step_chemical(chem, empty_measure(g), dt);
    for (size_t k = 0; k < c0.data.size(); ++k) {
        CHECK(chem.c.data[k] == c0.data[k] / (1.0 + 0.7 * dt));
        // implicit update tracks the exact exponential with O(dt^2) defect
        CHECK(chem.c.data[k] ==
              doctest::Approx(c0.data[k] * std::exp(-0.7 * dt)).epsilon(2e-5));
    }
}

TEST_CASE("Gaussian variance grows by 2 D t") {
    const DomainGrid g = DomainGrid::make_2d({0, 0}, {4, 4}, 200, 200);
    const double D = 0.004, s0 = 0.15, t_final = 0.5, dt = 0.0125;
    ChemicalField chem = make_chem(g, D, 0.0, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 p = g.center(i, j) - Vec2{2.0, 2.0};
            chem.c.at(i, j) = std::exp(-p.norm2() / (2 * s0 * s0));
        }
    const HybridMeasure m = empty_measure(g);
    for (double t = 0.0; t < t_final - 1e-12; t += dt) step_chemical(chem, m, dt);

    // moment quadrature
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 p = g.center(i, j);
            mass += chem.c.at(i, j);
            mx += chem.c.at(i, j) * p.x;
            my += chem.c.at(i, j) * p.y;
        }
    mx /= mass;
    my /= mass;
    double var = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 p = g.center(i, j);
            var += chem.c.at(i, j) * ((p.x - mx) * (p.x - mx) + (p.y - my) * (p.y - my));
        }
    var /= 2.0 * mass;  // per-axis variance
    CHECK(var == doctest::Approx(s0 * s0 + 2 * D * t_final).epsilon(0.02));
}

TEST_CASE("conservation without reaction terms") {
    const DomainGrid g = DomainGrid::make_2d({0, 0}, {2, 2}, 80, 80);
    ChemicalField chem = make_chem(g, 0.05, 0.0, 0.0);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (double& v : chem.c.data) v = d(rng);
    const HybridMeasure m = empty_measure(g);
    double before = integral(g, chem.c);
    for (int s = 0; s < 50; ++s) {
        step_chemical(chem, m, 0.02);
        const double after = integral(g, chem.c);
        CHECK(std::abs(after - before) < 1e-10);
        before = after;
    }
    for (double v : chem.c.data) CHECK(v > -1e-11);
}

TEST_CASE("source deposits alpha N dt, split between atoms and density") {
    const DomainGrid g = DomainGrid::make_2d({0, 0}, {4, 4}, 100, 100);
    ChemicalField chem = make_chem(g, 0.01, 0.8, 0.0);

    SimConfig cfg = make_preset("fig3-u1");
    cfg.u = 0.3;
    cfg.cells = 100;
    HybridMeasure m = build_initial_state(cfg).measure;
    // move atoms off cell centers, one into the domain corner
    for (size_t h = 0; h < m.atoms.size(); ++h) m.atoms[h] += Vec2{0.0037, -0.0081};
    m.atoms[0] = {0.0, 0.0};

    const double dt = 0.01;
    const double before = integral(g, chem.c);
    step_chemical(chem, m, dt);
    const double after = integral(g, chem.c);
    CHECK(after - before == doctest::Approx(0.8 * 25 * dt).epsilon(1e-10));
}

TEST_CASE("gradient taxis: exact on linear and quadratic fields") {
    const DomainGrid g = DomainGrid::make_2d({0, 0}, {1, 1}, 50, 50);
    ChemicalField chem = make_chem(g, 1.0, 0.0, 0.0);
    chem.taxis = TaxisKind::Gradient;
    chem.chi = 2.0;

    SUBCASE("constant") {
        chem.c.fill(3.0);
        const VectorGridField t = taxis_field(chem);
        for (double v : t.x.data) CHECK(v == 0.0);
        for (double v : t.y.data) CHECK(v == 0.0);
    }
    SUBCASE("linear") {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const Vec2 p = g.center(i, j);
                chem.c.at(i, j) = 0.7 * p.x + 1.3 * p.y + 0.2;
            }
        const VectorGridField t = taxis_field(chem);
        for (int j = 1; j < g.ny - 1; ++j)
            for (int i = 1; i < g.nx - 1; ++i) {
                CHECK(t.x.at(i, j) == doctest::Approx(2.0 * 0.7).epsilon(1e-12));
                CHECK(t.y.at(i, j) == doctest::Approx(2.0 * 1.3).epsilon(1e-12));
            }
    }
    SUBCASE("quadratic in d = 1") {
        const DomainGrid g1 = DomainGrid::make_1d(0, 1, 50);
        ChemicalField c1 = make_chem(g1, 1.0, 0.0, 0.0);
        c1.taxis = TaxisKind::Gradient;
        c1.chi = 1.0;
        for (int i = 0; i < g1.nx; ++i) {
            const double x = g1.center(i, 0).x;
            c1.c.at(i, 0) = x * x;
        }
        const VectorGridField t = taxis_field(c1);
        for (int i = 1; i < g1.nx - 1; ++i)
            CHECK(t.x.at(i, 0) == doctest::Approx(2.0 * g1.center(i, 0).x).epsilon(1e-12));
    }
}

TEST_CASE("nonlocal gradient") {
    SUBCASE("constant field gives zero") {
        const DomainGrid g = DomainGrid::make_2d({0, 0}, {2, 2}, 100, 100);
        ChemicalField chem = make_chem(g, 1.0, 0.0, 0.0);
        chem.c.fill(1.7);
        const Vec2 v = nonlocal_gradient(chem, {1.0, 1.0}, 0.3);
        CHECK(std::abs(v.x) < 1e-14);
        CHECK(std::abs(v.y) < 1e-14);
    }
    SUBCASE("linear field is recovered exactly in d = 2") {
        const DomainGrid g = DomainGrid::make_2d({0, 0}, {2, 2}, 200, 200);
        ChemicalField chem = make_chem(g, 1.0, 0.0, 0.0);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const Vec2 p = g.center(i, j);
                chem.c.at(i, j) = 0.4 * p.x - 0.9 * p.y;
            }
        const Vec2 v = nonlocal_gradient(chem, {1.0, 1.0}, 0.25);
        CHECK(v.x == doctest::Approx(0.4).epsilon(1e-10));
        CHECK(v.y == doctest::Approx(-0.9).epsilon(1e-10));
    }
    SUBCASE("two-point formula in d = 1") {
        // r aligned to the grid so samples land on cell centers
        const DomainGrid g = DomainGrid::make_1d(-2, 2, 400);  // dx = 0.01
        ChemicalField chem = make_chem(g, 1.0, 0.0, 0.0);
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.center(i, 0).x;
            chem.c.at(i, 0) = x * x;
        }
        const double r = 0.5;
        const double x0 = g.center(300, 0).x;
        const Vec2 v = nonlocal_gradient(chem, {x0, 0.0}, r);
        CHECK(v.x == doctest::Approx(2.0 * x0).epsilon(1e-12));
        const double xc = g.center(200, 0).x;
        const Vec2 vc = nonlocal_gradient(chem, {xc, 0.0}, r);
        CHECK(vc.x == doctest::Approx(2.0 * xc).epsilon(1e-9));
    }
    SUBCASE("sampling circle leaving the box raises OutOfDomain") {
        const DomainGrid g = DomainGrid::make_2d({0, 0}, {1, 1}, 50, 50);
        ChemicalField chem = make_chem(g, 1.0, 0.0, 0.0);
        CHECK_THROWS_AS(nonlocal_gradient(chem, {0.1, 0.5}, 0.2), OutOfDomainError);
    }
}

TEST_CASE("validation rejects bad chemical parameters") {
    const DomainGrid g = DomainGrid::make_1d(0, 1, 10);
    ChemicalField chem = make_chem(g, 0.0, 0.0, 0.0);  // D = 0 not SPD
    CHECK_THROWS_AS(chem.validate(), ValidationError);
    ChemicalField ok = make_chem(g, 0.1, 0.0, 0.0);
    CHECK_NOTHROW(ok.validate());
}
