#include "celldyn/snapshot_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include "celldyn/errors.hpp"

namespace celldyn {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_time_label(double t) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);  // binary: LF endings everywhere
    if (!f) throw SolverError("cannot open output file '" + path + "'");
    return f;
}

}  // namespace

void write_snapshot(const std::string& path, const HybridMeasure& m, double t) {
    std::ofstream f = open_out(path);
    const DomainGrid& g = m.grid;
    f << "# t=" << fmt(t) << " u=" << fmt(m.u) << " N=" << m.population << "\n";
    f << "# domain=" << fmt(g.lower.x) << " " << fmt(g.lower.y) << " " << fmt(g.upper.x) << " "
      << fmt(g.upper.y) << " cells=" << g.nx << " " << g.ny << " dim=" << g.dim << "\n";
    f << "atoms: h,x,y\n";
    for (size_t h = 0; h < m.atoms.size(); ++h)
        f << h << "," << fmt(m.atoms[h].x) << "," << fmt(m.atoms[h].y) << "\n";
    f << "density: i,j,value\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f << i << "," << j << "," << fmt(m.density.at(i, j)) << "\n";
    if (!f) throw SolverError("write failed for '" + path + "'");
}

LoadedSnapshot read_snapshot(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open snapshot '" + path + "'");
    LoadedSnapshot out;
    double u = 0.0;
    int population = 0;
    Vec2 lo{}, hi{};
    int nx = 0, ny = 0, dim = 0;

    std::string line;
    int lineno = 0;
    enum class Section { Header, Atoms, Density } section = Section::Header;
    std::vector<Vec2> atoms;
    std::vector<std::tuple<int, int, double>> density_entries;

    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            double t_;
            if (std::sscanf(line.c_str(), "# t=%lf u=%lf N=%d", &t_, &u, &population) == 3) {
                out.t = t_;
            } else {
                std::sscanf(line.c_str(), "# domain=%lf %lf %lf %lf cells=%d %d dim=%d", &lo.x,
                            &lo.y, &hi.x, &hi.y, &nx, &ny, &dim);
            }
            continue;
        }
        if (line.rfind("atoms:", 0) == 0) { section = Section::Atoms; continue; }
        if (line.rfind("density:", 0) == 0) { section = Section::Density; continue; }
        if (section == Section::Atoms) {
            long h;
            double x, y;
            if (std::sscanf(line.c_str(), "%ld,%lf,%lf", &h, &x, &y) != 3)
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad atom row");
            atoms.push_back({x, y});
        } else if (section == Section::Density) {
            int i, j;
            double v;
            if (std::sscanf(line.c_str(), "%d,%d,%lf", &i, &j, &v) != 3)
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad density row");
            density_entries.emplace_back(i, j, v);
        } else {
            throw ParseError(path + ":" + std::to_string(lineno) + ": content before section");
        }
    }
    if (nx == 0 || dim == 0)
        throw ParseError(path + ": missing '# domain=...' header line");

    HybridMeasure m;
    m.grid = dim == 1 ? DomainGrid::make_1d(lo.x, hi.x, nx)
                      : DomainGrid::make_2d(lo, hi, nx, ny);
    m.u = u;
    m.population = population;
    m.atoms = std::move(atoms);
    m.density = GridField(m.grid);
    for (const auto& [i, j, v] : density_entries) {
        if (!m.grid.in_bounds(i, j))
            throw ParseError(path + ": density index out of range");
        m.density.at(i, j) = v;
    }
    out.measure = std::move(m);
    return out;
}

void write_scalar_field(const std::string& path, const DomainGrid& g, const GridField& f,
                        double t) {
    std::ofstream out = open_out(path);
    out << "# t=" << fmt(t) << "\n";
    out << "field: i,j,value\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out << i << "," << j << "," << fmt(f.at(i, j)) << "\n";
}

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream f = open_out(path);
    f << "time,total_probability,atom_bbox,n_clusters_main,n_clusters_secondary,max_density,"
         "atoms_in_secondary\n";
    for (const SummaryRow& r : rows) {
        f << fmt(r.t) << "," << fmt(r.total_probability) << "," << fmt(r.bbox_lo.x) << " "
          << fmt(r.bbox_lo.y) << " " << fmt(r.bbox_hi.x) << " " << fmt(r.bbox_hi.y) << ","
          << r.n_main << "," << r.n_secondary << "," << fmt(r.max_density) << ","
          << r.atoms_in_secondary << "\n";
    }
}

ExperimentResult run_experiment(const SimConfig& config, const std::string& out_dir,
                                const ClusterParams& cluster_params) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw SolverError("cannot create output directory '" + out_dir + "'");

    SimState init = build_initial_state(config);
    StepControl ctrl;
    ctrl.dt_max = config.dt_max;
    ctrl.cfl = config.cfl;
    ctrl.t_max = config.t_max;
    Simulator::Options opt;
    opt.sigma = config.sigma;
    opt.threads = config.threads;
    Simulator sim(std::move(init), ctrl, opt);

    ExperimentResult result;
    try {
        result.run = sim.run(config.snapshot_times);
    } catch (const SolverError&) {
        // diagnostic dump of the failing state
        const std::string diag = out_dir + "/diagnostic_state.csv";
        write_snapshot(diag, sim.state().measure, sim.state().t);
        throw;
    }

    for (const Snapshot& s : result.run.snapshots) {
        const std::string label = fmt_time_label(s.t);
        const std::string spath = out_dir + "/snapshot_t" + label + ".csv";
        write_snapshot(spath, s.measure, s.t);
        result.files_written.push_back(spath);
        if (s.chem_c) {
            const std::string cpath = out_dir + "/c_t" + label + ".csv";
            write_scalar_field(cpath, s.measure.grid, *s.chem_c, s.t);
            result.files_written.push_back(cpath);
        }

        SummaryRow row;
        row.t = s.t;
        row.total_probability = total_probability(s.measure);
        if (!s.measure.atoms.empty()) {
            row.bbox_lo = row.bbox_hi = s.measure.atoms.front();
            for (const Vec2& a : s.measure.atoms) {
                row.bbox_lo.x = std::min(row.bbox_lo.x, a.x);
                row.bbox_lo.y = std::min(row.bbox_lo.y, a.y);
                row.bbox_hi.x = std::max(row.bbox_hi.x, a.x);
                row.bbox_hi.y = std::max(row.bbox_hi.y, a.y);
            }
        }
        const ClusterReport rep = detect_clusters(s.measure, cluster_params);
        row.n_main = rep.main_count;
        row.n_secondary = rep.secondary_count;
        row.atoms_in_secondary = rep.atoms_in_secondary;
        for (double v : s.measure.density.data) row.max_density = std::max(row.max_density, v);
        result.summary.push_back(row);
    }

    const std::string sumpath = out_dir + "/summary.csv";
    write_summary(sumpath, result.summary);
    result.files_written.push_back(sumpath);
    return result;
}

}  // namespace celldyn
