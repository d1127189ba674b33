#pragma once

#include <functional>
#include <string>
#include <vector>

#include "celldyn/kernel.hpp"

namespace celldyn {

enum class CoefficientRegime { Isotropic, AnisotropicRight, AnisotropicLeft };

/// Coefficients of the small-radius velocity expansion
///   v(x) = C0 rho + C1 rho_x + C2 rho_xx + C3 rho_xxx + C4 rho_xxxx   (d = 1).
struct LocalCoefficients {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    CoefficientRegime regime = CoefficientRegime::Isotropic;
};

/// Full-window expansion coefficients for U_R(x) = (x-R, x+R).
LocalCoefficients isotropic_coefficients(const KernelDerivatives& kd, int population, double R);

/// Half-window coefficients for U_R(x) = (x, x+R) (right) or (x-R, x) (left).
/// The left side follows from the sign map of the one-sided moments
/// integral_{x-R}^{x} (y-x)^n dy = (-1)^n R^(n+1) / (n+1).
LocalCoefficients anisotropic_coefficients(const KernelDerivatives& kd, int population, double R,
                                           bool right_side);

/// Coefficients of the same equation in rescaled variables x* = x/R,
/// t* = |C1| t / R^2 (pure coordinate transform; C1* becomes sign(C1)).
LocalCoefficients rescaled_coefficients(const LocalCoefficients& c, double R);

enum class PdeBoundary { Periodic, NoFlux };

/// One explicit conservative step of
///   drho/dt = -d/dx(C0 rho^2) - d/dx(rho (C1 rho_x + C2 rho_xx + C3 rho_xxx)),
/// truncated at the selected order (2 keeps C0 and C1; 4 adds C2 and C3).
/// Centered face stencils; the mobility rho at faces is floored at zero so the
/// flux form stays exactly conservative. `sign_k1` is the sign of k'(0):
/// order 2 with sign_k1 > 0 (backward diffusion) and order 4 with sign_k1 < 0
/// are rejected as ill-posed.
void local_pde_step(std::vector<double>& rho, const LocalCoefficients& c, double sign_k1,
                    int order, double dt, double dx, PdeBoundary bc = PdeBoundary::NoFlux);

/// Stable explicit dt for local_pde_step (diffusive scaling dx^2 at order 2,
/// dx^4 at order 4).
double local_pde_stable_dt(const std::vector<double>& rho, const LocalCoefficients& c, int order,
                           double dx);

/// Quadrature velocity of the 1D nonlocal model,
///   v(x) = N integral_{U_R(x)} k(y - x) rho(y) dy,
/// by the midpoint rule over cells with center in the window (density extended
/// by zero outside the grid). Opposite-offset taps are paired so odd kernels
/// cancel exactly on symmetric data.
std::vector<double> nonlocal_velocity_1d(const std::vector<double>& rho, double dx,
                                         const InteractionKernel& kern, int population);

/// One conservative upwind step of the 1D nonlocal transport equation with
/// the quadrature velocity. Zero inflow at the ends; throws CflViolationError
/// when dt * max outflow speed exceeds dx.
void nonlocal_1d_step(std::vector<double>& rho, const InteractionKernel& kern, int population,
                      double dt, double dx);

/// |v_quadrature - (C1 rho' + C3 rho''')| at x for an H1/H2 kernel, with the
/// window integral done by composite Simpson on the smooth profile. rho and
/// its derivatives are supplied analytically.
double velocity_expansion_residual(const InteractionKernel& kern, int population, double R,
                                   const std::function<double(double)>& rho,
                                   const std::function<double(double)>& rho_d1,
                                   const std::function<double(double)>& rho_d3, double x);

struct ConvergenceStudy {
    std::vector<double> radii;
    std::vector<double> l1_difference;      // nonlocal vs local order-2 solution at t_final
    std::vector<double> velocity_residual;  // expansion residual at eval_x, t = 0
    double residual_slope = 0.0;            // fitted log-log order of the residual
};

struct StudyConfig {
    InteractionKernel kernel;      // radius is replaced per study entry
    std::vector<double> radii;
    int population = 1;
    double domain_lo = -6.0;
    double domain_hi = 6.0;
    int cells = 2400;
    double gauss_sigma = 1.0;      // initial density: unit-mass Gaussian at 0
    double t_final = 0.1;          // physical time in original variables
    double eval_x = 0.3;           // residual evaluation point
};

/// Nonlocal-vs-local comparison over a family of shrinking radii
/// (repulsive kernels; the order-2 local model is the well-posed limit).
ConvergenceStudy convergence_study(const StudyConfig& cfg);

std::string to_string(CoefficientRegime r);

}  // namespace celldyn
