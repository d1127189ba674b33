#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "celldyn/chemical.hpp"
#include "celldyn/kernel.hpp"
#include "celldyn/transport.hpp"

namespace celldyn {

/// Flat key-value simulation configuration (dotted sections, one `key = value`
/// per line, `#` comments). Presets fig3-u<u> / fig4-u<u> expand to the
/// standard aggregation scenario: N = 25 cells on [0,4]^2, atoms on the 5x5
/// lattice over [1,3]^2, uniform density 1/4 on [1,3]^2, kernel k(z) = z on
/// B_R, T_max = 20, with R = 0.3 (fig3) or 0.6 (fig4).
struct SimConfig {
    std::string preset;

    int dim = 2;
    Vec2 domain_lower{0.0, 0.0};
    Vec2 domain_upper{4.0, 4.0};
    int cells = 200;  // per axis

    int population = 25;  // N
    double u = 1.0;
    double sensing_radius = 0.3;  // R
    double t_max = 20.0;

    KernelProfile kernel_profile = KernelProfile::Aggregation;
    Neighborhood neighborhood = Neighborhood::Ball;
    std::vector<double> kernel_coeffs;
    bool kernel_h1h2 = true;

    bool chem_enabled = false;
    double chem_diff = 1.0;
    double chem_alpha = 0.0;
    double chem_gamma = 0.0;
    TaxisKind chem_taxis = TaxisKind::None;
    double chem_chi = 1.0;
    double chem_r = 0.1;
    double chem_c0 = 0.0;

    double dt_max = 0.02;
    double cfl = 0.5;
    double sigma = 0.0;
    int threads = 2;
    std::uint64_t seed = 1;
    std::vector<double> snapshot_times{0.0, 1.0, 2.0, 5.0, 10.0, 20.0};

    enum class AtomInit { None, Lattice };
    AtomInit atom_init = AtomInit::Lattice;
    Vec2 lattice_lo{1.0, 1.0};
    Vec2 lattice_hi{3.0, 3.0};
    int lattice_nx = 5;
    int lattice_ny = 5;

    enum class DensityInit { Zero, UniformBox, Gaussian, Point };
    DensityInit density_init = DensityInit::UniformBox;
    Vec2 density_a{1.0, 1.0};  // box corners, or Gaussian/Point center
    Vec2 density_b{3.0, 3.0};
    double density_sigma = 0.25;
};

/// Parses and validates a config file. ParseError carries file/line/key
/// diagnostics; ValidationError lists every violated invariant.
SimConfig load_config(const std::string& path);
SimConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Canonical text form; load(serialize(c)) == c.
std::string serialize_config(const SimConfig& c);

/// Expands `fig3-u<u>` / `fig4-u<u>`.
SimConfig make_preset(const std::string& name);

void validate_config(const SimConfig& c);

/// Grid, measure, kernel and (optional) chemical field from a valid config.
SimState build_initial_state(const SimConfig& c);

bool operator==(const SimConfig& a, const SimConfig& b);

}  // namespace celldyn
