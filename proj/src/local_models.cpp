#include "celldyn/local_models.hpp"

#include <cmath>

#include "celldyn/errors.hpp"
#include "celldyn/numerics.hpp"

namespace celldyn {

LocalCoefficients isotropic_coefficients(const KernelDerivatives& kd, int population, double R) {
    if (!(R > 0.0)) throw ValidationError("isotropic_coefficients: R must be positive");
    const double N = population;
    const double R2 = R * R, R3 = R2 * R, R5 = R3 * R2;
    LocalCoefficients c;
    c.regime = CoefficientRegime::Isotropic;
    c.c0 = (2.0 * kd.k0 + kd.k2 * R2 / 3.0 + kd.k4 * R2 * R2 / 60.0) * N * R;
    c.c1 = (2.0 / 3.0 * kd.k1 + kd.k3 * R2 / 15.0) * N * R3;
    c.c2 = (kd.k0 / 3.0 + kd.k2 * R2 / 10.0) * N * R3;
    c.c3 = kd.k1 * N * R5 / 15.0;
    c.c4 = kd.k0 * N * R5 / 60.0;
    return c;
}

LocalCoefficients anisotropic_coefficients(const KernelDerivatives& kd, int population, double R,
                                           bool right_side) {
    if (!(R > 0.0)) throw ValidationError("anisotropic_coefficients: R must be positive");
    const double N = population;
    const double R2 = R * R, R3 = R2 * R, R4 = R2 * R2, R5 = R4 * R;
    LocalCoefficients c;
    if (right_side) {
        c.regime = CoefficientRegime::AnisotropicRight;
        c.c0 = (kd.k0 + kd.k1 * R / 2.0 + kd.k2 * R2 / 6.0 + kd.k3 * R3 / 24.0 +
                kd.k4 * R4 / 120.0) * N * R;
        c.c1 = (kd.k0 / 2.0 + kd.k1 * R / 3.0 + kd.k2 * R2 / 8.0 + kd.k3 * R3 / 30.0) * N * R2;
        c.c2 = (kd.k0 / 6.0 + kd.k1 * R / 8.0 + kd.k2 * R2 / 20.0) * N * R3;
        c.c3 = (kd.k0 / 24.0 + kd.k1 * R / 30.0) * N * R4;
        c.c4 = kd.k0 * N * R5 / 120.0;
    } else {
        // Sign map from the left-sided moments: terms of moment order p pick
        // up (-1)^p.
        c.regime = CoefficientRegime::AnisotropicLeft;
        c.c0 = (kd.k0 - kd.k1 * R / 2.0 + kd.k2 * R2 / 6.0 - kd.k3 * R3 / 24.0 +
                kd.k4 * R4 / 120.0) * N * R;
        c.c1 = (-kd.k0 / 2.0 + kd.k1 * R / 3.0 - kd.k2 * R2 / 8.0 + kd.k3 * R3 / 30.0) * N * R2;
        c.c2 = (kd.k0 / 6.0 - kd.k1 * R / 8.0 + kd.k2 * R2 / 20.0) * N * R3;
        c.c3 = (-kd.k0 / 24.0 + kd.k1 * R / 30.0) * N * R4;
        c.c4 = kd.k0 * N * R5 / 120.0;
    }
    return c;
}

LocalCoefficients rescaled_coefficients(const LocalCoefficients& c, double R) {
    const double a = std::abs(c.c1);
    if (!(a > 0.0)) throw ValidationError("rescaled_coefficients: C1 must be nonzero");
    LocalCoefficients out = c;
    out.c0 = c.c0 * R / a;
    out.c1 = c.c1 / a;  // sign(C1)
    out.c2 = c.c2 / (R * a);
    out.c3 = c.c3 / (R * R * a);
    out.c4 = c.c4 / (R * R * R * a);
    return out;
}

namespace {

struct Stencil1d {
    const std::vector<double>& rho;
    PdeBoundary bc;

    // ghost values: periodic wrap or even reflection about the boundary faces
    double operator()(long i) const {
        const long n = long(rho.size());
        if (bc == PdeBoundary::Periodic) {
            long k = i % n;
            if (k < 0) k += n;
            return rho[size_t(k)];
        }
        if (i < 0) i = -1 - i;
        if (i >= n) i = 2 * n - 1 - i;
        return rho[size_t(std::clamp(i, 0l, n - 1))];
    }
};

}  // namespace

void local_pde_step(std::vector<double>& rho, const LocalCoefficients& c, double sign_k1,
                    int order, double dt, double dx, PdeBoundary bc) {
    if (order != 2 && order != 4)
        throw ValidationError("local_pde_step: order must be 2 or 4");
    if (order == 2 && sign_k1 > 0.0)
        throw IllPosedConfigError(
            "order-2 expansion with k'(0) > 0 is a backward diffusion equation");
    if (order == 4 && sign_k1 < 0.0)
        throw IllPosedConfigError(
            "order-4 expansion with k'(0) < 0 is backward at leading order");

    const long n = long(rho.size());
    const Stencil1d s{rho, bc};
    std::vector<double> flux(size_t(n) + 1, 0.0);

    // face f sits between cells f-1 and f
    for (long f = 0; f <= n; ++f) {
        if (bc == PdeBoundary::NoFlux && (f == 0 || f == n)) continue;
        const double rm2 = s(f - 2), rm1 = s(f - 1), rp0 = s(f), rp1 = s(f + 1);
        const double mob = std::max(0.5 * (rm1 + rp0), 0.0);
        const double d1 = (rp0 - rm1) / dx;
        double val = c.c0 * mob * mob + mob * c.c1 * d1;
        if (order == 4) {
            const double d2 = (rp1 - rp0 - rm1 + rm2) / (2.0 * dx * dx);
            const double d3 = (rp1 - 3.0 * rp0 + 3.0 * rm1 - rm2) / (dx * dx * dx);
            val += mob * (c.c2 * d2 + c.c3 * d3);
        }
        flux[size_t(f)] = val;
    }

    const double lam = dt / dx;
    for (long i = 0; i < n; ++i) rho[size_t(i)] -= lam * (flux[size_t(i) + 1] - flux[size_t(i)]);
}

double local_pde_stable_dt(const std::vector<double>& rho, const LocalCoefficients& c, int order,
                           double dx) {
    double rmax = 0.0;
    for (double v : rho) rmax = std::max(rmax, v);
    rmax = std::max(rmax, 1e-12);
    const double adv = std::abs(c.c0) * 2.0 * rmax;
    double dt = 0.4 * dx / std::max(adv, 1e-300);
    dt = std::min(dt, 0.2 * dx * dx / std::max(std::abs(c.c1) * rmax, 1e-300));
    if (order == 4) {
        dt = std::min(dt, 0.1 * dx * dx * dx / std::max(std::abs(c.c2) * rmax, 1e-300));
        dt = std::min(dt, 0.05 * dx * dx * dx * dx / std::max(std::abs(c.c3) * rmax, 1e-300));
    }
    return dt;
}

std::vector<double> nonlocal_velocity_1d(const std::vector<double>& rho, double dx,
                                         const InteractionKernel& kern, int population) {
    const long n = long(rho.size());
    const double R = kern.radius;
    const long W = long(std::floor(R / dx)) + 1;
    std::vector<double> v(size_t(n), 0.0);

    auto rho_at = [&](long i) { return (i >= 0 && i < n) ? rho[size_t(i)] : 0.0; };
    auto masked = [&](double z) {
        return in_neighborhood(kern, {z, 0.0}, {}) ? kern.eval_profile({z, 0.0}).x : 0.0;
    };

    for (long i = 0; i < n; ++i) {
        double acc = masked(0.0) * rho_at(i);
        for (long d = 1; d <= W; ++d) {
            const double z = d * dx;
            acc += masked(z) * rho_at(i + d) + masked(-z) * rho_at(i - d);
        }
        v[size_t(i)] = population * dx * acc;
    }
    return v;
}

void nonlocal_1d_step(std::vector<double>& rho, const InteractionKernel& kern, int population,
                      double dt, double dx) {
    const long n = long(rho.size());
    const std::vector<double> v = nonlocal_velocity_1d(rho, dx, kern, population);

    std::vector<double> flux(size_t(n) + 1, 0.0);
    for (long f = 1; f < n; ++f) {
        const double u = 0.5 * (v[size_t(f - 1)] + v[size_t(f)]);
        flux[size_t(f)] =
            std::max(u, 0.0) * rho[size_t(f - 1)] + std::min(u, 0.0) * rho[size_t(f)];
    }
    flux[0] = std::min(v[0], 0.0) * rho[0];                    // outflow only
    flux[size_t(n)] = std::max(v[size_t(n - 1)], 0.0) * rho[size_t(n - 1)];

    const double lam = dt / dx;
    double max_coef = 0.0;
    for (long i = 0; i < n; ++i) {
        if (rho[size_t(i)] <= 0.0) continue;
        const double ue = i + 1 < n ? 0.5 * (v[size_t(i)] + v[size_t(i + 1)]) : v[size_t(i)];
        const double uw = i > 0 ? 0.5 * (v[size_t(i - 1)] + v[size_t(i)]) : v[size_t(i)];
        const double out = std::max(ue, 0.0) - std::min(uw, 0.0);
        max_coef = std::max(max_coef, lam * out);
    }
    if (max_coef > 1.0 + 1e-9)
        throw CflViolationError("nonlocal_1d_step: CFL violated (coefficient " +
                                std::to_string(max_coef) + ")");

    for (long i = 0; i < n; ++i)
        rho[size_t(i)] -= lam * (flux[size_t(i) + 1] - flux[size_t(i)]);
}

double velocity_expansion_residual(const InteractionKernel& kern, int population, double R,
                                   const std::function<double(double)>& rho,
                                   const std::function<double(double)>& rho_d1,
                                   const std::function<double(double)>& rho_d3, double x) {
    // composite Simpson over (x-R, x+R)
    const int panels = 2048;
    const double h = 2.0 * R / panels;
    double s = 0.0;
    auto f = [&](double z) { return kern.eval_profile({z, 0.0}).x * rho(x + z); };
    for (int p = 0; p < panels; ++p) {
        const double a = -R + p * h;
        s += f(a) + 4.0 * f(a + 0.5 * h) + f(a + h);
    }
    const double v_quad = population * s * h / 6.0;

    const LocalCoefficients c = isotropic_coefficients(kern.derivatives_at_zero(), population, R);
    const double v_exp = c.c1 * rho_d1(x) + c.c3 * rho_d3(x);
    return std::abs(v_quad - v_exp);
}

ConvergenceStudy convergence_study(const StudyConfig& cfg) {
    ConvergenceStudy out;
    out.radii = cfg.radii;

    const double s2 = cfg.gauss_sigma * cfg.gauss_sigma;
    auto rho_f = [&](double x) {
        return std::exp(-x * x / (2.0 * s2)) / (cfg.gauss_sigma * std::sqrt(2.0 * M_PI));
    };
    auto rho_d1 = [&](double x) { return -x / s2 * rho_f(x); };
    auto rho_d3 = [&](double x) { return (3.0 * x / (s2 * s2) - x * x * x / (s2 * s2 * s2)) * rho_f(x); };

    const double dx = (cfg.domain_hi - cfg.domain_lo) / cfg.cells;
    std::vector<double> rho0(size_t(cfg.cells));
    for (int i = 0; i < cfg.cells; ++i)
        rho0[size_t(i)] = rho_f(cfg.domain_lo + (i + 0.5) * dx);

    for (double R : cfg.radii) {
        InteractionKernel kern = cfg.kernel;
        kern.radius = R;
        const KernelDerivatives kd = kern.derivatives_at_zero();
        const LocalCoefficients c = isotropic_coefficients(kd, cfg.population, R);

        out.velocity_residual.push_back(velocity_expansion_residual(
            kern, cfg.population, R, rho_f, rho_d1, rho_d3, cfg.eval_x));

        // evolve both models to t_final in original variables
        std::vector<double> rho_nl = rho0;
        double t = 0.0;
        while (t < cfg.t_final) {
            const std::vector<double> v = nonlocal_velocity_1d(rho_nl, dx, kern, cfg.population);
            double vmax = 0.0;
            for (double u : v) vmax = std::max(vmax, std::abs(u));
            double dt = vmax > 0.0 ? 0.4 * dx / vmax : cfg.t_final - t;
            dt = std::min(dt, cfg.t_final - t);
            nonlocal_1d_step(rho_nl, kern, cfg.population, dt, dx);
            t += dt;
        }

        std::vector<double> rho_loc = rho0;
        t = 0.0;
        while (t < cfg.t_final) {
            double dt = local_pde_stable_dt(rho_loc, c, 2, dx);
            dt = std::min(dt, cfg.t_final - t);
            local_pde_step(rho_loc, c, kd.k1 < 0 ? -1.0 : 1.0, 2, dt, dx);
            t += dt;
        }

        double l1 = 0.0;
        for (size_t i = 0; i < rho_nl.size(); ++i) l1 += std::abs(rho_nl[i] - rho_loc[i]);
        out.l1_difference.push_back(l1 * dx);
    }

    out.residual_slope = loglog_slope(out.radii, out.velocity_residual);
    return out;
}

std::string to_string(CoefficientRegime r) {
    switch (r) {
        case CoefficientRegime::Isotropic: return "isotropic";
        case CoefficientRegime::AnisotropicRight: return "anisotropic-right";
        case CoefficientRegime::AnisotropicLeft: return "anisotropic-left";
    }
    return "?";
}

}  // namespace celldyn
