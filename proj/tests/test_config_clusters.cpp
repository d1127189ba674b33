#include <cmath>
#include <random>

#include "celldyn/clusters.hpp"
#include "celldyn/config.hpp"
#include "celldyn/errors.hpp"
#include "celldyn/snapshot_io.hpp"
#include "doctest.h"

using namespace celldyn;

TEST_CASE("presets expand to the standard scenario") {
    const SimConfig a = make_preset("fig3-u0.1");
    CHECK(a.u == 0.1);
    CHECK(a.sensing_radius == 0.3);
    CHECK(a.population == 25);
    CHECK(a.t_max == 20.0);
    CHECK(a.domain_upper.x == 4.0);

    const SimConfig b = make_preset("fig4-u1");
    CHECK(b.u == 1.0);
    CHECK(b.sensing_radius == 0.6);

    CHECK_THROWS_AS(make_preset("fig5-u1"), ParseError);
    CHECK_THROWS_AS(make_preset("fig3-uX"), ParseError);
}

TEST_CASE("config validation lists violations by name") {
    SimConfig c = make_preset("fig3-u0.1");
    c.u = 1.5;
    try {
        validate_config(c);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("model.u") != std::string::npos);
    }
}

TEST_CASE("parse errors carry line and key diagnostics") {
    try {
        parse_config_text("model.N = 25\nmodel.u = zebra\n", "cfg");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("model.u") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("nonsense without equals\n"), ParseError);
    CHECK_THROWS_AS(parse_config_text("unknown.key = 3\n"), ParseError);
}

TEST_CASE("config round-trips through its serialized form") {
    for (const char* name : {"fig3-u0", "fig3-u0.1", "fig3-u1", "fig4-u0.9"}) {
        const SimConfig c = make_preset(name);
        const SimConfig c2 = parse_config_text(serialize_config(c));
        const SimConfig c3 = parse_config_text(serialize_config(c2));
        CHECK(c == c2);
        CHECK(serialize_config(c2) == serialize_config(c3));
    }
}

TEST_CASE("initial state matches the published scenario") {
    const SimConfig cfg = make_preset("fig3-u0.1");
    const SimState st = build_initial_state(cfg);
    REQUIRE(st.measure.atoms.size() == 25);
    // corners of the atom lattice
    CHECK(st.measure.atoms.front().x == doctest::Approx(1.0));
    CHECK(st.measure.atoms.front().y == doctest::Approx(1.0));
    CHECK(st.measure.atoms.back().x == doctest::Approx(3.0));
    CHECK(st.measure.atoms.back().y == doctest::Approx(3.0));
    CHECK(st.measure.density_integral() == doctest::Approx(1.0).epsilon(1e-12));
    // uniform value 1/4 inside the support box
    const int i = st.measure.grid.cell_ix(2.0);
    CHECK(st.measure.density.at(i, i) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(st.kern.radius == 0.3);
}

TEST_CASE("detect_clusters: all atoms at one point") {
    HybridMeasure m;
    m.grid = DomainGrid::make_2d({0, 0}, {4, 4}, 100, 100);
    m.u = 0.0;
    m.population = 25;
    m.atoms.assign(25, Vec2{2.0, 2.0});
    m.density = GridField(m.grid);
    const ClusterReport rep = detect_clusters(m);
    REQUIRE(rep.clusters.size() == 1);
    CHECK(rep.main_count == 1);
    CHECK(rep.secondary_count == 0);
    CHECK(rep.clusters[0].atom_count == 25);
    CHECK(rep.clusters[0].mass_fraction == doctest::Approx(1.0));
    CHECK(rep.clusters[0].centroid.x == doctest::Approx(2.0));
}

TEST_CASE("detect_clusters: two separated density bumps") {
    HybridMeasure m;
    m.grid = DomainGrid::make_2d({0, 0}, {4, 4}, 200, 200);
    m.u = 1.0;
    m.population = 25;
    m.density = GridField(m.grid);
    for (int j = 0; j < 200; ++j)
        for (int i = 0; i < 200; ++i) {
            const Vec2 p = m.grid.center(i, j);
            const double r1 = (p - Vec2{1.0, 2.0}).norm2();
            const double r2 = (p - Vec2{3.0, 2.0}).norm2();
            const double v = std::exp(-r1 / 0.02) + std::exp(-r2 / 0.02);
            m.density.at(i, j) = v > 1e-10 ? v : 0.0;
        }
    m = normalize_density(std::move(m));
    const ClusterReport rep = detect_clusters(m);
    CHECK(rep.main_count == 2);
    CHECK(rep.secondary_count == 0);
    // a 2D Gaussian holds 90% of its mass above the 10%-of-peak level
    CHECK(rep.clusters[0].mass_fraction == doctest::Approx(0.45).epsilon(0.02));
}

TEST_CASE("detect_clusters: invariant under atom relabeling and density scaling") {
    SimConfig cfg = make_preset("fig3-u0.1");
    cfg.cells = 100;
    HybridMeasure m = build_initial_state(cfg).measure;
    const ClusterReport a = detect_clusters(m);

    std::mt19937 rng(5);
    std::shuffle(m.atoms.begin(), m.atoms.end(), rng);
    const ClusterReport b = detect_clusters(m);
    CHECK(a.main_count == b.main_count);
    CHECK(a.secondary_count == b.secondary_count);

    // scaling the density leaves the report unchanged (threshold is relative,
    // mass fractions renormalize)
    HybridMeasure scaled = m;
    for (double& v : scaled.density.data) v *= 10.0;
    scaled.u = m.u;  // note: mass fractions use total_probability of the state
    const ClusterReport c = detect_clusters(scaled);
    CHECK(c.main_count == b.main_count);
    CHECK(c.secondary_count == b.secondary_count);
}

TEST_CASE("detect_clusters: weightless parts are dropped") {
    // u = 0 with leftover density data: only atoms count
    SimConfig cfg = make_preset("fig3-u0");
    cfg.cells = 100;
    HybridMeasure m = build_initial_state(cfg).measure;
    const ClusterReport rep = detect_clusters(m);
    int atoms = 0;
    for (const Cluster& c : rep.clusters) {
        CHECK(c.mass_fraction > 0.0);
        atoms += c.atom_count;
    }
    CHECK(atoms == 25);
    // 25 isolated atoms, each 4% of the mass: all secondary
    CHECK(rep.main_count == 0);
    CHECK(rep.secondary_count == 25);

    // u = 1 with marker atoms: atom-only groups carry no mass
    SimConfig cfg1 = make_preset("fig3-u1");
    cfg1.cells = 100;
    HybridMeasure m1 = build_initial_state(cfg1).measure;
    const ClusterReport rep1 = detect_clusters(m1);
    for (const Cluster& c : rep1.clusters) CHECK(c.mass_fraction > 0.0);
}

TEST_CASE("run_experiment: unusable output directory fails cleanly") {
    SimConfig cfg = make_preset("fig3-u0");
    cfg.cells = 20;
    cfg.t_max = 0.1;
    cfg.snapshot_times = {0.1};
    CHECK_THROWS_AS(run_experiment(cfg, "/dev/null/nope"), SolverError);
}

TEST_CASE("detect_clusters: atoms merge into a nearby density cluster") {
    HybridMeasure m;
    m.grid = DomainGrid::make_2d({0, 0}, {4, 4}, 200, 200);
    m.u = 0.5;
    m.population = 4;
    m.density = GridField(m.grid);
    for (int j = 0; j < 200; ++j)
        for (int i = 0; i < 200; ++i) {
            const double r2 = (m.grid.center(i, j) - Vec2{2.0, 2.0}).norm2();
            const double v = std::exp(-r2 / 0.005);
            m.density.at(i, j) = v > 1e-10 ? v : 0.0;
        }
    m = normalize_density(std::move(m));
    // two atoms on the bump centroid, two isolated far away
    m.atoms = {{2.005, 2.0}, {1.995, 2.0}, {0.5, 0.5}, {3.5, 3.5}};
    const ClusterReport rep = detect_clusters(m);
    REQUIRE(rep.clusters.size() == 3);
    CHECK(rep.clusters[0].atom_count == 2);
    CHECK(rep.clusters[0].has_density);
    // 90% of the density mass (u = 0.5) plus two atoms of (1-u)/N each
    CHECK(rep.clusters[0].mass_fraction == doctest::Approx(0.5 * 0.9 + 0.25).epsilon(0.01));
}
