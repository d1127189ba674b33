#include "celldyn/kernel.hpp"

#include <cmath>
#include <random>

#include "celldyn/errors.hpp"

namespace celldyn {

Vec2 InteractionKernel::eval_profile(const Vec2& z) const {
    switch (profile) {
        case KernelProfile::Aggregation: return z;
        case KernelProfile::Repulsion: return -z;
        case KernelProfile::CustomPolynomial: {
            // Horner on the x component; 1D semantics.
            double v = 0.0;
            for (size_t n = poly_coeffs.size(); n-- > 0;) v = v * z.x + poly_coeffs[n];
            return {v, 0.0};
        }
    }
    return {};
}

static double poly_deriv_at_zero(const std::vector<double>& c, int order) {
    if (int(c.size()) <= order) return 0.0;
    double fact = 1.0;
    for (int m = 2; m <= order; ++m) fact *= m;
    return c[order] * fact;
}

double InteractionKernel::deriv1_at_zero() const {
    if (k1_analytic) return *k1_analytic;
    switch (profile) {
        case KernelProfile::Aggregation: return 1.0;
        case KernelProfile::Repulsion: return -1.0;
        case KernelProfile::CustomPolynomial: return poly_deriv_at_zero(poly_coeffs, 1);
    }
    return 0.0;
}

double InteractionKernel::deriv3_at_zero() const {
    if (k3_analytic) return *k3_analytic;
    switch (profile) {
        case KernelProfile::Aggregation:
        case KernelProfile::Repulsion: return 0.0;
        case KernelProfile::CustomPolynomial: return poly_deriv_at_zero(poly_coeffs, 3);
    }
    return 0.0;
}

KernelDerivatives InteractionKernel::derivatives_at_zero() const {
    KernelDerivatives d;
    switch (profile) {
        case KernelProfile::Aggregation: d.k1 = 1.0; break;
        case KernelProfile::Repulsion: d.k1 = -1.0; break;
        case KernelProfile::CustomPolynomial:
            d.k0 = poly_deriv_at_zero(poly_coeffs, 0);
            d.k1 = poly_deriv_at_zero(poly_coeffs, 1);
            d.k2 = poly_deriv_at_zero(poly_coeffs, 2);
            d.k3 = poly_deriv_at_zero(poly_coeffs, 3);
            d.k4 = poly_deriv_at_zero(poly_coeffs, 4);
            break;
    }
    if (k1_analytic) d.k1 = *k1_analytic;
    if (k3_analytic) d.k3 = *k3_analytic;
    return d;
}

void InteractionKernel::estimate_derivatives_numeric(double& k1, double& k3) const {
    const double h = 1e-4 * radius;
    auto f = [&](double z) { return eval_profile({z, 0.0}).x; };
    k1 = (f(h) - f(-h)) / (2 * h);
    k3 = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h);
}

void InteractionKernel::check_hypotheses(unsigned seed) const {
    if (!h1h2) return;
    const Vec2 at_zero = eval_profile({0.0, 0.0});
    if (at_zero.norm() > 1e-12)
        throw ValidationError("kernel declared H1 but k(0) != 0");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-radius, radius);
    for (int trial = 0; trial < 16; ++trial) {
        const Vec2 z{dist(rng), dist(rng)};
        const Vec2 a = eval_profile(z);
        const Vec2 b = eval_profile(-z);
        if ((a + b).norm() > 1e-10 * (1.0 + a.norm()))
            throw ValidationError("kernel declared H2 but k(-z) != -k(z)");
    }
}

bool in_neighborhood(const InteractionKernel& k, const Vec2& z, const Vec2& taxis) {
    const double R = k.radius;
    switch (k.neighborhood) {
        case Neighborhood::Ball: return z.norm2() <= R * R;
        case Neighborhood::RightHalf: return z.x >= 0.0 && z.x <= R && z.y == 0.0;
        case Neighborhood::LeftHalf: return z.x <= 0.0 && z.x >= -R && z.y == 0.0;
        case Neighborhood::TaxisAligned:
            if (taxis.x >= 0.0) return z.x >= 0.0 && z.x <= R && z.y == 0.0;
            return z.x <= 0.0 && z.x >= -R && z.y == 0.0;
    }
    return false;
}

Vec2 eval_kernel(const InteractionKernel& k, const Vec2& x, const Vec2& y, const Vec2& taxis) {
    const Vec2 z = y - x;
    if (!in_neighborhood(k, z, taxis)) return {};
    return k.eval_profile(z);
}

KernelProfile parse_kernel_profile(const std::string& name) {
    if (name == "aggregation") return KernelProfile::Aggregation;
    if (name == "repulsion") return KernelProfile::Repulsion;
    if (name == "custom-polynomial") return KernelProfile::CustomPolynomial;
    throw ParseError("unknown kernel profile '" + name + "'");
}

Neighborhood parse_neighborhood(const std::string& name) {
    if (name == "ball") return Neighborhood::Ball;
    if (name == "right") return Neighborhood::RightHalf;
    if (name == "left") return Neighborhood::LeftHalf;
    if (name == "taxis-aligned") return Neighborhood::TaxisAligned;
    throw ParseError("unknown neighborhood '" + name + "'");
}

std::string to_string(KernelProfile p) {
    switch (p) {
        case KernelProfile::Aggregation: return "aggregation";
        case KernelProfile::Repulsion: return "repulsion";
        case KernelProfile::CustomPolynomial: return "custom-polynomial";
    }
    return "?";
}

std::string to_string(Neighborhood n) {
    switch (n) {
        case Neighborhood::Ball: return "ball";
        case Neighborhood::RightHalf: return "right";
        case Neighborhood::LeftHalf: return "left";
        case Neighborhood::TaxisAligned: return "taxis-aligned";
    }
    return "?";
}

}  // namespace celldyn
