#include "celldyn/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace celldyn {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct DensityComponent {
    double mass = 0.0;  // probability mass u * N-normalized (fraction units)
    Vec2 weighted_pos{0.0, 0.0};
    double weight = 0.0;
};

}  // namespace

ClusterReport detect_clusters(const HybridMeasure& m, const ClusterParams& params) {
    const DomainGrid& g = m.grid;
    const double r_merge = params.merge_radius > 0.0 ? params.merge_radius : 2.0 * g.dx;
    const double total_mass = m.population * total_probability(m);

    // 1. density components of the super-level set (only meaningful for u > 0)
    std::vector<int> label(size_t(g.cells()), -1);
    std::vector<DensityComponent> comps;
    if (m.u > 0.0) {
        double rho_max = 0.0;
        for (double v : m.density.data) rho_max = std::max(rho_max, v);
        const double level = params.level_fraction * rho_max;
        if (rho_max > 0.0) {
            std::vector<int> stack;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const int idx = g.index(i, j);
                    if (label[idx] >= 0 || m.density.data[idx] < level) continue;
                    const int id = int(comps.size());
                    comps.emplace_back();
                    stack.assign(1, idx);
                    label[idx] = id;
                    while (!stack.empty()) {
                        const int cur = stack.back();
                        stack.pop_back();
                        const int ci = cur % g.nx, cj = cur / g.nx;
                        const double rho = m.density.data[cur];
                        comps[id].mass += m.u * m.population * rho * g.cell_volume();
                        comps[id].weighted_pos += rho * g.center(ci, cj);
                        comps[id].weight += rho;
                        const int nb[4][2] = {{ci - 1, cj}, {ci + 1, cj}, {ci, cj - 1}, {ci, cj + 1}};
                        for (auto& n : nb) {
                            if (!g.in_bounds(n[0], n[1])) continue;
                            const int nidx = g.index(n[0], n[1]);
                            if (label[nidx] >= 0 || m.density.data[nidx] < level) continue;
                            label[nidx] = id;
                            stack.push_back(nidx);
                        }
                    }
                }
        }
    }
    std::vector<Vec2> comp_centroid(comps.size());
    for (size_t c = 0; c < comps.size(); ++c)
        comp_centroid[c] = comps[c].weight > 0.0 ? (1.0 / comps[c].weight) * comps[c].weighted_pos
                                                 : Vec2{};

    // 2. union-find over entities: density components first, then atoms
    const int n_atoms = int(m.atoms.size());
    UnionFind uf(int(comps.size()) + n_atoms);
    const auto atom_entity = [&](int h) { return int(comps.size()) + h; };

    for (int h = 0; h < n_atoms; ++h)
        for (int l = h + 1; l < n_atoms; ++l)
            if ((m.atoms[h] - m.atoms[l]).norm() <= r_merge) uf.unite(atom_entity(h), atom_entity(l));
    for (int h = 0; h < n_atoms; ++h)
        for (size_t c = 0; c < comps.size(); ++c)
            if ((m.atoms[h] - comp_centroid[c]).norm() <= r_merge) uf.unite(atom_entity(h), int(c));

    // 3. aggregate
    struct Agg {
        double mass = 0.0;
        Vec2 wpos{0.0, 0.0};
        double w = 0.0;
        int atoms = 0;
        bool has_density = false;
    };
    std::vector<int> root_of(size_t(uf.parent.size()), -1);
    std::vector<Agg> aggs;
    auto agg_for = [&](int entity) -> Agg& {
        const int r = uf.find(entity);
        if (root_of[size_t(r)] < 0) {
            root_of[size_t(r)] = int(aggs.size());
            aggs.emplace_back();
        }
        return aggs[size_t(root_of[size_t(r)])];
    };
    for (size_t c = 0; c < comps.size(); ++c) {
        Agg& a = agg_for(int(c));
        a.mass += comps[c].mass;
        a.wpos += comps[c].mass * comp_centroid[c];
        a.w += comps[c].mass;
        a.has_density = true;
    }
    const double atom_mass = m.u < 1.0 ? (1.0 - m.u) : 0.0;
    for (int h = 0; h < n_atoms; ++h) {
        Agg& a = agg_for(atom_entity(h));
        a.mass += atom_mass;
        a.wpos += std::max(atom_mass, 1e-300) * m.atoms[h];
        a.w += std::max(atom_mass, 1e-300);
        a.atoms += 1;
    }

    ClusterReport report;
    for (const Agg& a : aggs) {
        if (a.mass <= 0.0) continue;  // weightless marker entities
        Cluster c;
        c.centroid = a.w > 0.0 ? (1.0 / a.w) * a.wpos : Vec2{};
        c.mass_fraction = total_mass > 0.0 ? a.mass / total_mass : 0.0;
        c.atom_count = a.atoms;
        c.has_density = a.has_density;
        report.clusters.push_back(c);
    }
    std::sort(report.clusters.begin(), report.clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.mass_fraction > b.mass_fraction; });
    for (const Cluster& c : report.clusters) {
        if (c.mass_fraction >= params.main_mass_fraction) ++report.main_count;
        else {
            ++report.secondary_count;
            report.atoms_in_secondary += c.atom_count;
        }
    }
    return report;
}

}  // namespace celldyn
