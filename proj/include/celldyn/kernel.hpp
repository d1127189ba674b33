#pragma once

#include <optional>
#include <string>
#include <vector>

#include "celldyn/vec.hpp"

namespace celldyn {

enum class KernelProfile {
    Aggregation,       // k(z) = z on the sensing neighborhood
    Repulsion,         // k(z) = -z
    CustomPolynomial,  // k(z) = sum_n c_n z^n acting on the x component (d = 1)
};

enum class Neighborhood {
    Ball,          // |z| <= R (closed)
    RightHalf,     // 0 <= z <= R, d = 1
    LeftHalf,      // -R <= z <= 0, d = 1
    TaxisAligned,  // right half if the taxis x-component at x is >= 0, else left (d = 1)
};

/// k(0), k'(0), k''(0), k'''(0), k''''(0) of a scalar 1D kernel profile.
struct KernelDerivatives {
    double k0 = 0.0, k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
};

/// Interaction kernel K(x, y) = k(y - x) restricted to the sensing
/// neighborhood U_R(x). Points exactly on the neighborhood boundary count as
/// inside (deterministic tie rule).
struct InteractionKernel {
    KernelProfile profile = KernelProfile::Aggregation;
    double radius = 0.3;
    Neighborhood neighborhood = Neighborhood::Ball;
    std::vector<double> poly_coeffs;  // CustomPolynomial only, ascending powers
    bool h1h2 = false;                // declared hypotheses k(0)=0, k(-z)=-k(z)

    // Analytic derivative samples take precedence over numeric estimation.
    std::optional<double> k1_analytic;
    std::optional<double> k3_analytic;

    /// Raw profile value, no neighborhood mask.
    Vec2 eval_profile(const Vec2& z) const;

    /// k'(0) and k'''(0): analytic values if supplied (CustomPolynomial and the
    /// named profiles have exact ones), otherwise central differences with
    /// step 1e-4 * R.
    double deriv1_at_zero() const;
    double deriv3_at_zero() const;

    /// All five derivative samples; exact for the named and polynomial
    /// profiles.
    KernelDerivatives derivatives_at_zero() const;

    /// k'(0) and k'''(0) by central differences with step 1e-4 * R, the
    /// fallback when no analytic values are available. Local-model
    /// coefficients are sensitive to these, so analytic values win whenever
    /// they exist.
    void estimate_derivatives_numeric(double& k1, double& k3) const;

    /// Checks the declared H1/H2 hypotheses by spot evaluation at random
    /// displacements; throws ValidationError on mismatch.
    void check_hypotheses(unsigned seed = 12345u) const;
};

bool in_neighborhood(const InteractionKernel& k, const Vec2& z, const Vec2& taxis);

/// K(x, y): k(y - x) when y lies in U_R(x), zero otherwise. The taxis value
/// at x is only consulted for the taxis-aligned neighborhood.
Vec2 eval_kernel(const InteractionKernel& k, const Vec2& x, const Vec2& y, const Vec2& taxis = {});

KernelProfile parse_kernel_profile(const std::string& name);
Neighborhood parse_neighborhood(const std::string& name);
std::string to_string(KernelProfile p);
std::string to_string(Neighborhood n);

}  // namespace celldyn
