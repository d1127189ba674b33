#include "celldyn/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "celldyn/errors.hpp"
#include "celldyn/numerics.hpp"

namespace celldyn {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct KeyValue {
    std::string value;
    int line = 0;
};

double parse_double(const std::string& key, const KeyValue& kv) {
    try {
        size_t pos = 0;
        const double v = std::stod(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(kv.line) + ": key '" + key +
                         "' expects a number, got '" + kv.value + "'");
    }
}

long parse_int(const std::string& key, const KeyValue& kv) {
    try {
        size_t pos = 0;
        const long v = std::stol(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(kv.line) + ": key '" + key +
                         "' expects an integer, got '" + kv.value + "'");
    }
}

bool parse_bool(const std::string& key, const KeyValue& kv) {
    if (kv.value == "true" || kv.value == "1") return true;
    if (kv.value == "false" || kv.value == "0") return false;
    throw ParseError("line " + std::to_string(kv.line) + ": key '" + key +
                     "' expects true/false, got '" + kv.value + "'");
}

std::vector<double> parse_doubles(const std::string& key, const KeyValue& kv) {
    std::vector<double> out;
    std::istringstream ss(kv.value);
    std::string tok;
    while (ss >> tok) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(kv.line) + ": key '" + key +
                             "' expects numbers, got '" + tok + "'");
        }
    }
    return out;
}

}  // namespace

SimConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, KeyValue> kvs;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
        kvs[key] = KeyValue{value, lineno};
    }

    SimConfig c;
    if (auto it = kvs.find("preset"); it != kvs.end()) {
        c = make_preset(it->second.value);
        kvs.erase(it);
    }

    std::optional<KeyValue> taken;
    auto take = [&](const char* key) -> const KeyValue* {
        auto it = kvs.find(key);
        if (it == kvs.end()) return nullptr;
        taken = it->second;
        kvs.erase(it);
        return &*taken;
    };

    if (auto* kv = take("domain.dim")) c.dim = int(parse_int("domain.dim", *kv));
    if (auto* kv = take("domain.lower")) {
        const auto v = parse_doubles("domain.lower", *kv);
        c.domain_lower = {v.size() > 0 ? v[0] : 0.0, v.size() > 1 ? v[1] : 0.0};
    }
    if (auto* kv = take("domain.upper")) {
        const auto v = parse_doubles("domain.upper", *kv);
        c.domain_upper = {v.size() > 0 ? v[0] : 0.0, v.size() > 1 ? v[1] : 0.0};
    }
    if (auto* kv = take("domain.cells")) c.cells = int(parse_int("domain.cells", *kv));
    if (auto* kv = take("model.N")) c.population = int(parse_int("model.N", *kv));
    if (auto* kv = take("model.u")) c.u = parse_double("model.u", *kv);
    if (auto* kv = take("model.R")) c.sensing_radius = parse_double("model.R", *kv);
    if (auto* kv = take("model.Tmax")) c.t_max = parse_double("model.Tmax", *kv);
    if (auto* kv = take("kernel.profile")) c.kernel_profile = parse_kernel_profile(kv->value);
    if (auto* kv = take("kernel.neighborhood")) c.neighborhood = parse_neighborhood(kv->value);
    if (auto* kv = take("kernel.coeffs")) c.kernel_coeffs = parse_doubles("kernel.coeffs", *kv);
    if (auto* kv = take("kernel.h1h2")) c.kernel_h1h2 = parse_bool("kernel.h1h2", *kv);
    if (auto* kv = take("chem.enabled")) c.chem_enabled = parse_bool("chem.enabled", *kv);
    if (auto* kv = take("chem.D")) c.chem_diff = parse_double("chem.D", *kv);
    if (auto* kv = take("chem.alpha")) c.chem_alpha = parse_double("chem.alpha", *kv);
    if (auto* kv = take("chem.gamma")) c.chem_gamma = parse_double("chem.gamma", *kv);
    if (auto* kv = take("chem.taxis")) c.chem_taxis = parse_taxis_kind(kv->value);
    if (auto* kv = take("chem.chi")) c.chem_chi = parse_double("chem.chi", *kv);
    if (auto* kv = take("chem.r")) c.chem_r = parse_double("chem.r", *kv);
    if (auto* kv = take("chem.c0")) c.chem_c0 = parse_double("chem.c0", *kv);
    if (auto* kv = take("step.dt_max")) c.dt_max = parse_double("step.dt_max", *kv);
    if (auto* kv = take("step.cfl")) c.cfl = parse_double("step.cfl", *kv);
    if (auto* kv = take("sim.sigma")) c.sigma = parse_double("sim.sigma", *kv);
    if (auto* kv = take("sim.threads")) c.threads = int(parse_int("sim.threads", *kv));
    if (auto* kv = take("sim.seed")) c.seed = std::uint64_t(parse_int("sim.seed", *kv));
    if (auto* kv = take("snapshots.times")) c.snapshot_times = parse_doubles("snapshots.times", *kv);
    if (auto* kv = take("init.atoms")) {
        std::istringstream ss(kv->value);
        std::string kind;
        ss >> kind;
        if (kind == "none") {
            c.atom_init = SimConfig::AtomInit::None;
        } else if (kind == "lattice") {
            c.atom_init = SimConfig::AtomInit::Lattice;
            if (!(ss >> c.lattice_lo.x >> c.lattice_lo.y >> c.lattice_hi.x >> c.lattice_hi.y >>
                  c.lattice_nx >> c.lattice_ny))
                throw ParseError("line " + std::to_string(kv->line) +
                                 ": init.atoms = lattice x0 y0 x1 y1 nx ny");
        } else {
            throw ParseError("line " + std::to_string(kv->line) + ": unknown init.atoms '" + kind +
                             "'");
        }
    }
    if (auto* kv = take("init.density")) {
        std::istringstream ss(kv->value);
        std::string kind;
        ss >> kind;
        if (kind == "zero") {
            c.density_init = SimConfig::DensityInit::Zero;
        } else if (kind == "uniform-box") {
            c.density_init = SimConfig::DensityInit::UniformBox;
            if (!(ss >> c.density_a.x >> c.density_a.y >> c.density_b.x >> c.density_b.y))
                throw ParseError("line " + std::to_string(kv->line) +
                                 ": init.density = uniform-box x0 y0 x1 y1");
        } else if (kind == "gaussian") {
            c.density_init = SimConfig::DensityInit::Gaussian;
            if (!(ss >> c.density_a.x >> c.density_a.y >> c.density_sigma))
                throw ParseError("line " + std::to_string(kv->line) +
                                 ": init.density = gaussian cx cy sigma");
        } else if (kind == "point") {
            c.density_init = SimConfig::DensityInit::Point;
            if (!(ss >> c.density_a.x >> c.density_a.y))
                throw ParseError("line " + std::to_string(kv->line) +
                                 ": init.density = point cx cy");
        } else {
            throw ParseError("line " + std::to_string(kv->line) + ": unknown init.density '" +
                             kind + "'");
        }
    }

    if (!kvs.empty()) {
        std::string unknown;
        for (const auto& [k, v] : kvs)
            unknown += "  line " + std::to_string(v.line) + ": unknown key '" + k + "'\n";
        throw ParseError(origin + ": unrecognized keys\n" + unknown);
    }

    validate_config(c);
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string serialize_config(const SimConfig& c) {
    std::ostringstream out;
    if (!c.preset.empty()) out << "# expanded from preset " << c.preset << "\n";
    out << "domain.dim = " << c.dim << "\n";
    out << "domain.lower = " << fmt_double(c.domain_lower.x) << " " << fmt_double(c.domain_lower.y)
        << "\n";
    out << "domain.upper = " << fmt_double(c.domain_upper.x) << " " << fmt_double(c.domain_upper.y)
        << "\n";
    out << "domain.cells = " << c.cells << "\n";
    out << "model.N = " << c.population << "\n";
    out << "model.u = " << fmt_double(c.u) << "\n";
    out << "model.R = " << fmt_double(c.sensing_radius) << "\n";
    out << "model.Tmax = " << fmt_double(c.t_max) << "\n";
    out << "kernel.profile = " << to_string(c.kernel_profile) << "\n";
    out << "kernel.neighborhood = " << to_string(c.neighborhood) << "\n";
    if (!c.kernel_coeffs.empty()) {
        out << "kernel.coeffs =";
        for (double v : c.kernel_coeffs) out << " " << fmt_double(v);
        out << "\n";
    }
    out << "kernel.h1h2 = " << (c.kernel_h1h2 ? "true" : "false") << "\n";
    out << "chem.enabled = " << (c.chem_enabled ? "true" : "false") << "\n";
    out << "chem.D = " << fmt_double(c.chem_diff) << "\n";
    out << "chem.alpha = " << fmt_double(c.chem_alpha) << "\n";
    out << "chem.gamma = " << fmt_double(c.chem_gamma) << "\n";
    out << "chem.taxis = " << to_string(c.chem_taxis) << "\n";
    out << "chem.chi = " << fmt_double(c.chem_chi) << "\n";
    out << "chem.r = " << fmt_double(c.chem_r) << "\n";
    out << "chem.c0 = " << fmt_double(c.chem_c0) << "\n";
    out << "step.dt_max = " << fmt_double(c.dt_max) << "\n";
    out << "step.cfl = " << fmt_double(c.cfl) << "\n";
    out << "sim.sigma = " << fmt_double(c.sigma) << "\n";
    out << "sim.threads = " << c.threads << "\n";
    out << "sim.seed = " << c.seed << "\n";
    out << "snapshots.times =";
    for (double t : c.snapshot_times) out << " " << fmt_double(t);
    out << "\n";
    if (c.atom_init == SimConfig::AtomInit::None) {
        out << "init.atoms = none\n";
    } else {
        out << "init.atoms = lattice " << fmt_double(c.lattice_lo.x) << " "
            << fmt_double(c.lattice_lo.y) << " " << fmt_double(c.lattice_hi.x) << " "
            << fmt_double(c.lattice_hi.y) << " " << c.lattice_nx << " " << c.lattice_ny << "\n";
    }
    switch (c.density_init) {
        case SimConfig::DensityInit::Zero: out << "init.density = zero\n"; break;
        case SimConfig::DensityInit::UniformBox:
            out << "init.density = uniform-box " << fmt_double(c.density_a.x) << " "
                << fmt_double(c.density_a.y) << " " << fmt_double(c.density_b.x) << " "
                << fmt_double(c.density_b.y) << "\n";
            break;
        case SimConfig::DensityInit::Gaussian:
            out << "init.density = gaussian " << fmt_double(c.density_a.x) << " "
                << fmt_double(c.density_a.y) << " " << fmt_double(c.density_sigma) << "\n";
            break;
        case SimConfig::DensityInit::Point:
            out << "init.density = point " << fmt_double(c.density_a.x) << " "
                << fmt_double(c.density_a.y) << "\n";
            break;
    }
    return out.str();
}

SimConfig make_preset(const std::string& name) {
    double R;
    std::string rest;
    if (name.rfind("fig3-u", 0) == 0) {
        R = 0.3;
        rest = name.substr(6);
    } else if (name.rfind("fig4-u", 0) == 0) {
        R = 0.6;
        rest = name.substr(6);
    } else {
        throw ParseError("unknown preset '" + name + "' (expected fig3-u<u> or fig4-u<u>)");
    }
    double u;
    try {
        size_t pos = 0;
        u = std::stod(rest, &pos);
        if (pos != rest.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ParseError("preset '" + name + "': cannot parse sensing ability u from '" + rest +
                         "'");
    }
    SimConfig c;
    c.preset = name;
    c.sensing_radius = R;
    c.u = u;
    validate_config(c);
    return c;
}

void validate_config(const SimConfig& c) {
    std::string bad;
    if (c.dim != 1 && c.dim != 2) bad += "domain.dim must be 1 or 2; ";
    if (c.cells < 1) bad += "domain.cells must be >= 1; ";
    if (!(c.domain_upper.x > c.domain_lower.x)) bad += "domain.upper must exceed domain.lower; ";
    if (c.dim == 2 && !(c.domain_upper.y > c.domain_lower.y))
        bad += "domain.upper must exceed domain.lower componentwise; ";
    if (c.population < 1) bad += "model.N must be >= 1; ";
    if (c.u < 0.0 || c.u > 1.0) bad += "model.u must be in [0,1]; ";
    if (!(c.sensing_radius > 0.0)) bad += "model.R must be > 0; ";
    if (!(c.t_max > 0.0)) bad += "model.Tmax must be > 0; ";
    if (c.dim == 2 && c.neighborhood != Neighborhood::Ball)
        bad += "anisotropic neighborhoods are only available in d = 1; ";
    if (c.dim == 2 && c.kernel_profile == KernelProfile::CustomPolynomial)
        bad += "custom-polynomial kernels are only available in d = 1; ";
    if (c.kernel_profile == KernelProfile::CustomPolynomial && c.kernel_coeffs.empty())
        bad += "custom-polynomial kernel needs kernel.coeffs; ";
    if (!(c.cfl > 0.0 && c.cfl <= 1.0)) bad += "step.cfl must be in (0,1]; ";
    if (!(c.dt_max > 0.0)) bad += "step.dt_max must be > 0; ";
    if (c.sigma < 0.0) bad += "sim.sigma must be >= 0; ";
    if (c.threads < 1) bad += "sim.threads must be >= 1; ";
    if (c.chem_enabled) {
        if (!(c.chem_diff > 0.0)) bad += "chem.D must be > 0; ";
        if (c.chem_alpha < 0.0) bad += "chem.alpha must be >= 0; ";
        if (c.chem_gamma < 0.0) bad += "chem.gamma must be >= 0; ";
        if (c.chem_taxis == TaxisKind::NonlocalGradient && !(c.chem_r > 0.0))
            bad += "chem.r must be > 0 for the nonlocal taxis; ";
        if (c.chem_c0 < 0.0) bad += "chem.c0 must be >= 0; ";
    }
    if (c.atom_init == SimConfig::AtomInit::Lattice) {
        if (c.lattice_nx < 1 || (c.dim == 2 && c.lattice_ny < 1)) bad += "lattice counts must be >= 1; ";
        const int n_lattice = c.dim == 2 ? c.lattice_nx * c.lattice_ny : c.lattice_nx;
        if (n_lattice != c.population)
            bad += "lattice atom count (" + std::to_string(n_lattice) + ") must equal model.N; ";
    } else if (c.u < 1.0) {
        bad += "init.atoms = none requires model.u = 1; ";
    }
    if (c.density_init == SimConfig::DensityInit::Zero && c.u > 0.0)
        bad += "init.density = zero requires model.u = 0; ";
    for (size_t k = 0; k + 1 < c.snapshot_times.size(); ++k)
        if (c.snapshot_times[k] > c.snapshot_times[k + 1]) {
            bad += "snapshots.times must be nondecreasing; ";
            break;
        }
    for (double t : c.snapshot_times)
        if (t < 0.0 || t > c.t_max) {
            bad += "snapshots.times must lie in [0, Tmax]; ";
            break;
        }
    if (!bad.empty()) throw ValidationError("invalid configuration: " + bad);
}

SimState build_initial_state(const SimConfig& c) {
    validate_config(c);
    SimState st;
    DomainGrid grid =
        c.dim == 1 ? DomainGrid::make_1d(c.domain_lower.x, c.domain_upper.x, c.cells)
                   : DomainGrid::make_2d(c.domain_lower, c.domain_upper, c.cells,
                                         int(std::lround(c.cells * (c.domain_upper.y - c.domain_lower.y) /
                                                         (c.domain_upper.x - c.domain_lower.x))));

    HybridMeasure m;
    m.grid = grid;
    m.u = c.u;
    m.population = c.population;
    m.density = GridField(grid);

    if (c.atom_init == SimConfig::AtomInit::Lattice) {
        const int ny = c.dim == 2 ? c.lattice_ny : 1;
        for (int h2 = 0; h2 < ny; ++h2)
            for (int h1 = 0; h1 < c.lattice_nx; ++h1) {
                Vec2 p;
                p.x = c.lattice_nx > 1
                          ? c.lattice_lo.x + h1 * (c.lattice_hi.x - c.lattice_lo.x) / (c.lattice_nx - 1)
                          : 0.5 * (c.lattice_lo.x + c.lattice_hi.x);
                if (c.dim == 2)
                    p.y = ny > 1 ? c.lattice_lo.y + h2 * (c.lattice_hi.y - c.lattice_lo.y) / (ny - 1)
                                 : 0.5 * (c.lattice_lo.y + c.lattice_hi.y);
                m.atoms.push_back(p);
            }
    }

    switch (c.density_init) {
        case SimConfig::DensityInit::Zero: break;
        case SimConfig::DensityInit::UniformBox: {
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    const Vec2 p = grid.center(i, j);
                    const bool inside = p.x >= c.density_a.x && p.x <= c.density_b.x &&
                                        (c.dim == 1 ||
                                         (p.y >= c.density_a.y && p.y <= c.density_b.y));
                    if (inside) m.density.at(i, j) = 1.0;
                }
            break;
        }
        case SimConfig::DensityInit::Gaussian: {
            const double s2 = c.density_sigma * c.density_sigma;
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    const double r2 = (grid.center(i, j) - c.density_a).norm2();
                    m.density.at(i, j) = std::exp(-r2 / (2.0 * s2));
                }
            break;
        }
        case SimConfig::DensityInit::Point:
            splat_point(grid, m.density, c.density_a, 1.0);
            break;
    }
    if (c.u > 0.0) m = normalize_density(std::move(m));
    m.validate();
    st.measure = std::move(m);

    st.kern.profile = c.kernel_profile;
    st.kern.radius = c.sensing_radius;
    st.kern.neighborhood = c.neighborhood;
    st.kern.poly_coeffs = c.kernel_coeffs;
    st.kern.h1h2 = c.kernel_h1h2 || c.kernel_profile == KernelProfile::Aggregation ||
                   c.kernel_profile == KernelProfile::Repulsion;

    if (c.chem_enabled) {
        ChemicalField chem;
        chem.grid = grid;
        chem.c = GridField(grid, c.chem_c0);
        chem.diff_x = chem.diff_y = c.chem_diff;
        chem.alpha = c.chem_alpha;
        chem.gamma = c.chem_gamma;
        chem.taxis = c.chem_taxis;
        chem.chi = c.chem_chi;
        chem.sense_radius = c.chem_r;
        st.chem = std::move(chem);
    }
    return st;
}

bool operator==(const SimConfig& a, const SimConfig& b) {
    SimConfig a2 = a, b2 = b;
    a2.preset.clear();
    b2.preset.clear();
    return serialize_config(a2) == serialize_config(b2);
}

}  // namespace celldyn
