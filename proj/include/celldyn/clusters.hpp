#pragma once

#include <vector>

#include "celldyn/measure.hpp"

namespace celldyn {

struct Cluster {
    Vec2 centroid{0.0, 0.0};
    double mass_fraction = 0.0;
    int atom_count = 0;
    bool has_density = false;  // contains a super-level density component
};

struct ClusterReport {
    std::vector<Cluster> clusters;  // sorted by mass fraction, descending
    int main_count = 0;             // mass fraction >= main threshold
    int secondary_count = 0;
    int atoms_in_secondary = 0;
};

struct ClusterParams {
    double level_fraction = 0.1;    // density threshold as a fraction of max
    double merge_radius = -1.0;     // < 0: use 2 * dx
    double main_mass_fraction = 0.05;
};

/// Connected components (4-neighbor) of the density super-level set
/// {rho >= level_fraction * max rho} form density clusters; atoms within the
/// merge radius of each other or of a density cluster centroid are merged in.
/// Cluster mass combines (1-u) per atom and u * N * density integral; zero
/// mass entities (the weightless part at u = 0 or 1) are dropped.
ClusterReport detect_clusters(const HybridMeasure& m, const ClusterParams& params = {});

}  // namespace celldyn
