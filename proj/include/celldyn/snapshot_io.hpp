#pragma once

#include <string>
#include <vector>

#include "celldyn/clusters.hpp"
#include "celldyn/config.hpp"
#include "celldyn/measure.hpp"
#include "celldyn/transport.hpp"

namespace celldyn {

/// Snapshot CSV layout:
///   # t=<time> u=<u> N=<N>
///   # domain=<lx> <ly> <ux> <uy> cells=<nx> <ny> dim=<d>
///   atoms: h,x,y
///   ...
///   density: i,j,value   (row-major grid indices)
/// All numbers `%.17g`, `.` decimal separator, LF line endings.
void write_snapshot(const std::string& path, const HybridMeasure& m, double t);

struct LoadedSnapshot {
    double t = 0.0;
    HybridMeasure measure;
};
LoadedSnapshot read_snapshot(const std::string& path);

void write_scalar_field(const std::string& path, const DomainGrid& g, const GridField& f,
                        double t);

struct SummaryRow {
    double t = 0.0;
    double total_probability = 0.0;
    Vec2 bbox_lo{0.0, 0.0};
    Vec2 bbox_hi{0.0, 0.0};
    int n_main = 0;
    int n_secondary = 0;
    double max_density = 0.0;
    int atoms_in_secondary = 0;
};
void write_summary(const std::string& path, const std::vector<SummaryRow>& rows);

struct ExperimentResult {
    RunResult run;
    std::vector<SummaryRow> summary;
    std::vector<std::string> files_written;
};

/// Runs transport::simulate for the config, writing snapshot_t<time>.csv,
/// c_t<time>.csv when chemistry is enabled, and summary.csv into out_dir.
/// Throws on solver or I/O failure (after dumping a diagnostic state when the
/// solver aborts mid-run).
ExperimentResult run_experiment(const SimConfig& config, const std::string& out_dir,
                                const ClusterParams& cluster_params = {});

}  // namespace celldyn
