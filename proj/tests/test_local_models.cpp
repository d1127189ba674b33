#include <cmath>
#include <random>

#include "celldyn/errors.hpp"
#include "celldyn/local_models.hpp"
#include "celldyn/numerics.hpp"
#include "doctest.h"

using namespace celldyn;

namespace {

// Independent oracle for the expansion coefficients: the coefficient of
// rho^(m) collects every kernel Taylor term k_j z^j with j + m <= 4 weighted
// by the window moment integral of z^(j+m), i.e.
//   C_m = N * sum_j kd_j / (j! m!) * I_{j+m},   I_p = integral_window z^p dz.
// The moments are integrated numerically (composite Simpson; quadrature error
// ~1e-15 relative) so the check is independent of the closed forms under test.
void simpson_moments(double lo, double hi, double out[9]) {
    const int panels = 20000;
    const double h = (hi - lo) / panels;
    for (int p = 0; p <= 8; ++p) out[p] = 0.0;
    auto accumulate = [&](double z, double w) {
        double zp = 1.0;
        for (int p = 0; p <= 8; ++p) {
            out[p] += w * zp;
            zp *= z;
        }
    };
    for (int c = 0; c < panels; ++c) {
        const double a = lo + c * h;
        accumulate(a, 1.0);
        accumulate(a + 0.5 * h, 4.0);
        accumulate(a + h, 1.0);
    }
    for (int p = 0; p <= 8; ++p) out[p] *= h / 6.0;
}

void oracle_coefficients(const KernelDerivatives& kd, int N, double lo, double hi,
                         double out[5]) {
    const double kj[5] = {kd.k0, kd.k1, kd.k2, kd.k3, kd.k4};
    double fact[5] = {1, 1, 2, 6, 24};
    double moments[9];
    simpson_moments(lo, hi, moments);
    for (int m = 0; m <= 4; ++m) {
        double c = 0.0;
        for (int j = 0; j + m <= 4; ++j) c += kj[j] / (fact[j] * fact[m]) * moments[j + m];
        out[m] = N * c;
    }
}

double gauss(double x, double s) { return std::exp(-x * x / (2 * s * s)) / (s * std::sqrt(2 * M_PI)); }

double variance(const std::vector<double>& rho, double lo, double dx) {
    double m0 = 0, m1 = 0, m2 = 0;
    for (size_t i = 0; i < rho.size(); ++i) {
        const double x = lo + (double(i) + 0.5) * dx;
        m0 += rho[i];
        m1 += rho[i] * x;
        m2 += rho[i] * x * x;
    }
    const double mean = m1 / m0;
    return m2 / m0 - mean * mean;
}

}  // namespace

TEST_CASE("isotropic coefficients: H1/H2 hand values") {
    KernelDerivatives kd;
    kd.k1 = 1.0;
    const LocalCoefficients c = isotropic_coefficients(kd, 25, 0.3);
    CHECK(c.c0 == 0.0);
    CHECK(c.c2 == 0.0);
    CHECK(c.c4 == 0.0);
    CHECK(c.c1 == doctest::Approx(0.45).epsilon(1e-14));           // (2/3) * 25 * 0.027
    CHECK(c.c3 == doctest::Approx(25.0 * std::pow(0.3, 5) / 15.0).epsilon(1e-14));
    CHECK(c.c3 == doctest::Approx(4.05e-3).epsilon(1e-12));
}

TEST_CASE("anisotropic coefficients: H1/H2 hand values, right window") {
    KernelDerivatives kd;
    kd.k1 = 1.0;
    const LocalCoefficients c = anisotropic_coefficients(kd, 1, 1.0, true);
    CHECK(c.c0 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.c1 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(c.c2 == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(c.c3 == doctest::Approx(1.0 / 30.0).epsilon(1e-14));
    CHECK(c.c4 == 0.0);
}

TEST_CASE("all-zero derivatives give all-zero coefficients") {
    const KernelDerivatives kd;
    const LocalCoefficients iso = isotropic_coefficients(kd, 10, 0.5);
    const LocalCoefficients an = anisotropic_coefficients(kd, 10, 0.5, true);
    for (double v : {iso.c0, iso.c1, iso.c2, iso.c3, iso.c4, an.c0, an.c1, an.c2, an.c3, an.c4})
        CHECK(v == 0.0);
}

TEST_CASE("coefficient formulas match the moment-quadrature oracle") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> kdist(-2.0, 2.0);
    std::uniform_real_distribution<double> Rdist(0.05, 1.0);
    std::uniform_int_distribution<int> Ndist(1, 50);
    for (int trial = 0; trial < 100; ++trial) {
        KernelDerivatives kd;
        kd.k0 = kdist(rng);
        kd.k1 = kdist(rng);
        kd.k2 = kdist(rng);
        kd.k3 = kdist(rng);
        kd.k4 = kdist(rng);
        const double R = Rdist(rng);
        const int N = Ndist(rng);

        double want[5];
        oracle_coefficients(kd, N, -R, R, want);
        const LocalCoefficients iso = isotropic_coefficients(kd, N, R);
        const double got_iso[5] = {iso.c0, iso.c1, iso.c2, iso.c3, iso.c4};
        for (int m = 0; m <= 4; ++m) {
            const double scale = std::max(std::abs(want[m]), 1e-9);
            CHECK(std::abs(got_iso[m] - want[m]) / scale < 1e-6);
        }

        oracle_coefficients(kd, N, 0.0, R, want);
        const LocalCoefficients right = anisotropic_coefficients(kd, N, R, true);
        const double got_r[5] = {right.c0, right.c1, right.c2, right.c3, right.c4};
        for (int m = 0; m <= 4; ++m) {
            const double scale = std::max(std::abs(want[m]), 1e-9);
            CHECK(std::abs(got_r[m] - want[m]) / scale < 1e-6);
        }

        oracle_coefficients(kd, N, -R, 0.0, want);
        const LocalCoefficients left = anisotropic_coefficients(kd, N, R, false);
        const double got_l[5] = {left.c0, left.c1, left.c2, left.c3, left.c4};
        for (int m = 0; m <= 4; ++m) {
            const double scale = std::max(std::abs(want[m]), 1e-9);
            CHECK(std::abs(got_l[m] - want[m]) / scale < 1e-6);
        }
    }
}

TEST_CASE("left window flips C0 and C2 under H1/H2") {
    KernelDerivatives kd;
    kd.k1 = -0.8;
    kd.k3 = 0.5;
    const LocalCoefficients r = anisotropic_coefficients(kd, 7, 0.4, true);
    const LocalCoefficients l = anisotropic_coefficients(kd, 7, 0.4, false);
    CHECK(l.c0 == doctest::Approx(-r.c0).epsilon(1e-14));
    CHECK(l.c1 == doctest::Approx(r.c1).epsilon(1e-14));
    CHECK(l.c2 == doctest::Approx(-r.c2).epsilon(1e-14));
    CHECK(l.c3 == doctest::Approx(r.c3).epsilon(1e-14));
}

TEST_CASE("C3 / (R^2 C1) approaches 1/10 as R shrinks, sign follows k'(0)") {
    KernelDerivatives kd;
    kd.k1 = 0.9;
    kd.k3 = -2.0;
    for (double R : {1e-2, 1e-3}) {
        const LocalCoefficients c = isotropic_coefficients(kd, 3, R);
        CHECK((c.c1 > 0) == (kd.k1 > 0));
        CHECK(c.c3 / (R * R * c.c1) == doctest::Approx(0.1).epsilon(1e-3));
    }
}

TEST_CASE("rescaled coefficients reproduce the unit-diffusion form") {
    KernelDerivatives kd;
    kd.k1 = 1.0;  // attraction
    const double R = 0.25;
    const LocalCoefficients c = anisotropic_coefficients(kd, 4, R, true);
    const LocalCoefficients star = rescaled_coefficients(c, R);
    CHECK(star.c1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(star.c0 == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(star.c2 == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
    CHECK(star.c3 == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("rescaling maps solutions of the original equation to starred ones") {
    KernelDerivatives kd;
    kd.k1 = -1.0;  // repulsive: order-2 model well posed
    const double R = 0.5;
    const int N = 2;
    const LocalCoefficients c = isotropic_coefficients(kd, N, R);
    const LocalCoefficients star = rescaled_coefficients(c, R);

    const int cells = 300;
    const double lo = -3.0, hi = 3.0;
    const double dx = (hi - lo) / cells;
    std::vector<double> rho(cells);
    for (int i = 0; i < cells; ++i) rho[i] = gauss(lo + (i + 0.5) * dx, 0.5);

    // starred grid covers the same physical points: x* = x / R
    const double dxs = dx / R;
    std::vector<double> rho_star = rho;

    const double t_final = 0.05;
    const double ts_final = std::abs(c.c1) * t_final / (R * R);
    const int steps = 2000;
    for (int s = 0; s < steps; ++s)
        local_pde_step(rho, c, -1.0, 2, t_final / steps, dx);
    for (int s = 0; s < steps; ++s)
        local_pde_step(rho_star, star, -1.0, 2, ts_final / steps, dxs);

    for (int i = 0; i < cells; ++i)
        CHECK(rho[i] == doctest::Approx(rho_star[i]).epsilon(1e-10));
}

TEST_CASE("local PDE step: fixed points, conservation, monotone variance") {
    KernelDerivatives kd;
    kd.k1 = -1.0;
    const LocalCoefficients c = isotropic_coefficients(kd, 1, 0.3);

    SUBCASE("constant density is stationary") {
        std::vector<double> rho(200, 0.7);
        local_pde_step(rho, c, -1.0, 2, 1e-4, 0.01);
        for (double v : rho) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));
    }
    SUBCASE("mass conserved to 1e-12 over many steps") {
        const int cells = 128;
        const double dx = 6.0 / cells;
        std::vector<double> rho(cells);
        for (int i = 0; i < cells; ++i) rho[i] = gauss(-3.0 + (i + 0.5) * dx, 0.6);
        double mass0 = 0.0;
        for (double v : rho) mass0 += v;
        const double dt = local_pde_stable_dt(rho, c, 2, dx);
        for (int s = 0; s < 10000; ++s) local_pde_step(rho, c, -1.0, 2, dt, dx);
        double mass1 = 0.0;
        for (double v : rho) mass1 += v;
        CHECK(std::abs(mass1 - mass0) * dx < 1e-12);
    }
    SUBCASE("repulsive order-2 model spreads: variance strictly increases") {
        const int cells = 256;
        const double dx = 6.0 / cells;
        std::vector<double> rho(cells);
        for (int i = 0; i < cells; ++i) rho[i] = gauss(-3.0 + (i + 0.5) * dx, 0.4);
        double var = variance(rho, -3.0, dx);
        const double dt = local_pde_stable_dt(rho, c, 2, dx);
        for (int s = 0; s < 200; ++s) {
            local_pde_step(rho, c, -1.0, 2, dt, dx);
            const double nv = variance(rho, -3.0, dx);
            CHECK(nv > var);
            var = nv;
        }
    }
    SUBCASE("attractive order-4 model contracts at early times") {
        KernelDerivatives ka;
        ka.k1 = 1.0;
        const LocalCoefficients ca = isotropic_coefficients(ka, 1, 0.3);
        const int cells = 128;
        const double dx = 4.0 / cells;
        std::vector<double> rho(cells);
        for (int i = 0; i < cells; ++i) rho[i] = gauss(-2.0 + (i + 0.5) * dx, 0.5);
        double var = variance(rho, -2.0, dx);
        const double dt = local_pde_stable_dt(rho, ca, 4, dx);
        for (int s = 0; s < 50; ++s) {
            local_pde_step(rho, ca, 1.0, 4, dt, dx);
            const double nv = variance(rho, -2.0, dx);
            CHECK(nv <= var);
            var = nv;
        }
    }
}

TEST_CASE("ill-posed expansion orders are rejected") {
    KernelDerivatives kd;
    kd.k1 = 1.0;
    const LocalCoefficients c = isotropic_coefficients(kd, 1, 0.3);
    std::vector<double> rho(64, 1.0);
    CHECK_THROWS_AS(local_pde_step(rho, c, +1.0, 2, 1e-5, 0.1), IllPosedConfigError);
    CHECK_THROWS_AS(local_pde_step(rho, c, -1.0, 4, 1e-5, 0.1), IllPosedConfigError);
}

TEST_CASE("nonlocal 1D velocity") {
    InteractionKernel kern;
    kern.profile = KernelProfile::Aggregation;
    kern.h1h2 = true;

    SUBCASE("symmetric density: zero velocity at the symmetry point") {
        kern.radius = 0.4;
        const int cells = 401;  // odd: center cell in the middle
        const double dx = 4.0 / cells;
        std::vector<double> rho(cells);
        for (int i = 0; i <= cells / 2; ++i) {
            rho[i] = gauss(-2.0 + (i + 0.5) * dx, 0.5);
            rho[cells - 1 - i] = rho[i];  // exact mirror
        }
        const std::vector<double> v = nonlocal_velocity_1d(rho, dx, kern, 3);
        CHECK(v[cells / 2] == 0.0);  // paired taps cancel exactly
    }
    SUBCASE("constant density: zero velocity in the interior") {
        kern.radius = 0.3;
        const int cells = 200;
        const double dx = 2.0 / cells;
        std::vector<double> rho(cells, 1.3);
        const std::vector<double> v = nonlocal_velocity_1d(rho, dx, kern, 2);
        const int w = int(kern.radius / dx) + 2;
        for (int i = w; i < cells - w; ++i) CHECK(v[i] == 0.0);
    }
    SUBCASE("support shrinking below the cell width kills the velocity") {
        kern.radius = 1e-4;
        const double dx = 0.01;
        std::vector<double> rho(100);
        for (int i = 0; i < 100; ++i) rho[i] = gauss(-0.5 + (i + 0.5) * dx, 0.2);
        for (double v : nonlocal_velocity_1d(rho, dx, kern, 5)) CHECK(v == 0.0);
    }
    SUBCASE("linear density reproduces C1 rho'") {
        // rho(y) = y around x = 0; exact velocity 2 R^3 / 3
        kern.radius = 0.3;
        const int m = 1000;
        const double dx = kern.radius / (m + 0.5);  // window faces align to cells
        const int cells = 4 * m;
        std::vector<double> rho(cells);
        const double lo = -double(cells) / 2 * dx;
        for (int i = 0; i < cells; ++i) rho[i] = lo + (i + 0.5) * dx;
        const std::vector<double> v = nonlocal_velocity_1d(rho, dx, kern, 1);
        const double want = 2.0 * std::pow(kern.radius, 3) / 3.0;
        CHECK(std::abs(v[cells / 2] - want) < 1e-8);
    }
}

TEST_CASE("nonlocal 1D step: conservation and CFL guard") {
    InteractionKernel kern;
    kern.profile = KernelProfile::Repulsion;
    kern.h1h2 = true;
    kern.radius = 0.25;
    const int cells = 240;
    const double dx = 6.0 / cells;
    std::vector<double> rho(cells);
    for (int i = 0; i < cells; ++i) rho[i] = gauss(-3.0 + (i + 0.5) * dx, 0.5);
    double mass0 = 0.0;
    for (double v : rho) mass0 += v;
    for (int s = 0; s < 200; ++s) nonlocal_1d_step(rho, kern, 2, 5e-4, dx);
    double mass1 = 0.0;
    for (double v : rho) mass1 += v;
    CHECK(std::abs(mass1 - mass0) * dx < 1e-12);
    for (double v : rho) CHECK(v >= 0.0);

    CHECK_THROWS_AS(nonlocal_1d_step(rho, kern, 200, 1.0, dx), CflViolationError);
}

TEST_CASE("velocity expansion residual: small radii, tiny residuals") {
    // odd degree-5 kernel: first neglected term enters at R^7
    InteractionKernel kern;
    kern.profile = KernelProfile::CustomPolynomial;
    kern.poly_coeffs = {0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0};
    kern.h1h2 = true;

    auto rho = [](double x) { return gauss(x, 1.0); };
    auto rho_d1 = [&](double x) { return -x * gauss(x, 1.0); };
    auto rho_d3 = [&](double x) { return (3 * x - x * x * x) * gauss(x, 1.0); };

    const double r_small = velocity_expansion_residual(kern, 1, 1e-2, rho, rho_d1, rho_d3, 0.3);
    CHECK(r_small < 1e-8);
}

TEST_CASE("convergence study: residual slope near 7, errors shrink with R") {
    StudyConfig cfg;
    cfg.kernel.profile = KernelProfile::CustomPolynomial;
    cfg.kernel.poly_coeffs = {0.0, -1.0, 0.0, 1.0 / 6.0, 0.0, -1.0 / 120.0};  // repulsive
    cfg.kernel.h1h2 = true;
    cfg.radii = {0.2, 0.1, 0.05, 0.025};
    cfg.cells = 2400;  // keeps discretization noise below the model difference
    cfg.t_final = 0.05;
    const ConvergenceStudy study = convergence_study(cfg);
    REQUIRE(study.velocity_residual.size() == 4);
    for (size_t k = 0; k + 1 < study.l1_difference.size(); ++k)
        CHECK(study.l1_difference[k] > study.l1_difference[k + 1]);
    CHECK(study.residual_slope > 6.5);
    CHECK(study.residual_slope < 7.5);
}
