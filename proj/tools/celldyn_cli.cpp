// Command line front end: simulate / local-study / validate / clusters.

#include <clocale>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "celldyn/clusters.hpp"
#include "celldyn/config.hpp"
#include "celldyn/local_models.hpp"
#include "celldyn/particle_mc.hpp"
#include "celldyn/snapshot_io.hpp"

namespace {

using namespace celldyn;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SimConfig resolve_config(const std::string& config_path, const std::string& preset,
                         const std::vector<std::string>& overrides, int grid, int threads,
                         long seed) {
    SimConfig cfg;
    if (!config_path.empty())
        cfg = load_config(config_path);
    else if (!preset.empty())
        cfg = make_preset(preset);
    else
        throw ValidationError("either --config or --preset is required");

    if (!overrides.empty()) {
        std::string text = serialize_config(cfg);
        for (const std::string& ov : overrides) text += ov + "\n";
        cfg = parse_config_text(text, "<override>");
    }
    if (grid > 0) cfg.cells = grid;
    if (threads > 0) cfg.threads = threads;
    if (seed >= 0) cfg.seed = std::uint64_t(seed);
    validate_config(cfg);
    return cfg;
}

int cmd_simulate(const SimConfig& cfg, const std::string& out_dir) {
    const ExperimentResult res = run_experiment(cfg, out_dir);
    std::cout << "steps: " << res.run.stats.steps << "\n";
    std::cout << "max interior mass residual: " << res.run.stats.max_mass_residual << "\n";
    std::cout << "boundary outflow: " << res.run.stats.boundary_outflow << "\n";
    std::cout << "total probability drift: " << res.run.stats.max_prob_drift << "\n";
    if (!res.summary.empty()) {
        const SummaryRow& last = res.summary.back();
        std::cout << "final clusters: " << last.n_main << " main, " << last.n_secondary
                  << " secondary\n";
    }
    std::cout << "wrote " << res.files_written.size() << " files to " << out_dir << "\n";
    return 0;
}

int cmd_local_study(const std::string& kernel_spec, const std::vector<double>& radii,
                    const std::string& out_path, int population) {
    InteractionKernel kern;
    std::istringstream ss(kernel_spec);
    std::string name;
    ss >> name;
    kern.profile = parse_kernel_profile(name);
    double coeff;
    while (ss >> coeff) kern.poly_coeffs.push_back(coeff);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot open " << out_path << "\n";
        return 1;
    }
    out << "regime,R,C0,C1,C2,C3,C4\n";
    for (double R : radii) {
        kern.radius = R;
        const KernelDerivatives kd = kern.derivatives_at_zero();
        const LocalCoefficients iso = isotropic_coefficients(kd, population, R);
        const LocalCoefficients right = anisotropic_coefficients(kd, population, R, true);
        const LocalCoefficients left = anisotropic_coefficients(kd, population, R, false);
        for (const LocalCoefficients* c : {&iso, &right, &left}) {
            out << to_string(c->regime) << "," << fmt(R) << "," << fmt(c->c0) << "," << fmt(c->c1)
                << "," << fmt(c->c2) << "," << fmt(c->c3) << "," << fmt(c->c4) << "\n";
        }
    }
    std::cout << "wrote coefficient table for " << radii.size() << " radii to " << out_path << "\n";
    return 0;
}

int cmd_validate(const std::vector<int>& ensemble_sizes, long seed, const std::string& out_path,
                 double sigma, double t_final, double dt, int n_particles, int threads) {
    ValidateConfig cfg;
    cfg.ensemble_sizes = ensemble_sizes;
    cfg.seed = std::uint64_t(seed < 0 ? 1 : seed);
    cfg.sigma = sigma;
    cfg.t_final = t_final;
    cfg.dt = dt;
    cfg.n_particles = n_particles;
    cfg.threads = threads > 0 ? threads : 1;
    const ValidateReport rep = validate_against_pde(cfg);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot open " << out_path << "\n";
        return 1;
    }
    out << "t,M,W1,msd,runtime_s\n";
    for (const ValidateRow& r : rep.rows)
        out << fmt(r.t) << "," << r.ensemble_size << "," << fmt(r.w1) << "," << fmt(r.msd) << ","
            << fmt(r.runtime_s) << "\n";
    std::cout << "wrote validation report (" << rep.rows.size() << " rows) to " << out_path << "\n";
    return 0;
}

int cmd_clusters(const std::string& snapshot_path, double level, double merge_radius,
                 double main_fraction) {
    const LoadedSnapshot snap = read_snapshot(snapshot_path);
    ClusterParams params;
    params.level_fraction = level;
    params.merge_radius = merge_radius;
    params.main_mass_fraction = main_fraction;
    const ClusterReport rep = detect_clusters(snap.measure, params);
    std::cout << "t=" << fmt(snap.t) << " clusters=" << rep.clusters.size()
              << " main=" << rep.main_count << " secondary=" << rep.secondary_count << "\n";
    std::cout << "centroid_x,centroid_y,mass_fraction,atom_count\n";
    for (const Cluster& c : rep.clusters)
        std::cout << fmt(c.centroid.x) << "," << fmt(c.centroid.y) << "," << fmt(c.mass_fraction)
                  << "," << c.atom_count << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");
    CLI::App app{"hybrid-measure cell population dynamics"};
    app.require_subcommand(1);

    std::string config_path, preset, out = "out";
    std::vector<std::string> overrides;
    int grid = -1, threads = -1;
    long seed = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--preset", preset, "preset name (fig3-u<u> | fig4-u<u>)");
        sub->add_option("--set", overrides, "override config entries, e.g. --set model.Tmax=2");
        sub->add_option("--out", out, "output directory or file");
        sub->add_option("--grid", grid, "override cells per axis");
        sub->add_option("--threads", threads, "worker threads");
        sub->add_option("--seed", seed, "random seed");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run a transport simulation");
    add_common(sim);

    CLI::App* study = app.add_subcommand("local-study", "small-radius coefficient table");
    std::string kernel_spec = "aggregation";
    std::vector<double> radii{0.3};
    int population = 1;
    study->add_option("--kernel", kernel_spec,
                      "kernel spec: aggregation | repulsion | custom-polynomial c0 c1 ...");
    study->add_option("--R", radii, "sensing radii");
    study->add_option("--N", population, "population size N");
    study->add_option("--out", out, "output csv");

    CLI::App* val = app.add_subcommand("validate", "SDE ensemble vs Eulerian solver");
    std::vector<int> ensemble_sizes{100, 1000, 10000};
    double v_sigma = 0.125, v_t = 1.0, v_dt = 1e-3;
    int v_particles = 1;
    val->add_option("--ensemble-sizes", ensemble_sizes, "realization counts M")->delimiter(',');
    val->add_option("--sigma", v_sigma, "noise intensity");
    val->add_option("--tfinal", v_t, "final time");
    val->add_option("--dt", v_dt, "time step");
    val->add_option("--particles", v_particles, "particles per realization N");
    val->add_option("--seed", seed, "random seed");
    val->add_option("--threads", threads, "worker threads");
    val->add_option("--out", out, "output csv");

    CLI::App* clu = app.add_subcommand("clusters", "cluster report for a snapshot");
    std::string snapshot_path;
    double level = 0.1, merge_radius = -1.0, main_fraction = 0.05;
    clu->add_option("snapshot", snapshot_path, "snapshot csv")->required();
    clu->add_option("--level", level, "density threshold fraction of max");
    clu->add_option("--merge-radius", merge_radius, "atom merge radius (default 2 dx)");
    clu->add_option("--main-fraction", main_fraction, "main cluster mass fraction");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(resolve_config(config_path, preset, overrides, grid, threads, seed),
                                out);
        if (study->parsed())
            return cmd_local_study(kernel_spec, radii, out == "out" ? "coefficients.csv" : out,
                                   population);
        if (val->parsed())
            return cmd_validate(ensemble_sizes, seed, out == "out" ? "validation.csv" : out,
                                v_sigma, v_t, v_dt, v_particles, threads);
        if (clu->parsed()) return cmd_clusters(snapshot_path, level, merge_radius, main_fraction);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
