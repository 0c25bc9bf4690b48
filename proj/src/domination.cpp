#include "pcd/domination.hpp"

#include <algorithm>
#include <cstdint>

namespace pcd {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::InnerExact: return "inner-exact";
    case Provenance::OuterExact: return "outer-exact";
    case Provenance::OuterGreedy: return "outer-greedy";
  }
  return "?";
}

std::vector<int> PrototypeSet::indices() const {
  std::vector<int> out;
  out.reserve(items.size());
  for (const auto& p : items) out.push_back(p.index);
  return out;
}

bool is_dominating(const Digraph& g, const std::vector<int>& set) {
  std::vector<char> hit(g.size(), 0);
  for (int s : set) {
    hit[s] = 1;
    for (int v : g.out[s]) hit[v] = 1;
  }
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

std::vector<int> greedy_mds(const Digraph& g) {
  const int n = g.size();
  std::vector<char> residual(n, 1);
  int left = n;
  std::vector<int> chosen;
  while (left > 0) {
    int best = -1, best_cover = -1;
    for (int u = 0; u < n; ++u) {
      if (!residual[u]) continue;
      int cover = 1;
      for (int v : g.out[u]) cover += residual[v];
      if (cover > best_cover) {
        best_cover = cover;
        best = u;
      }
    }
    chosen.push_back(best);
    residual[best] = 0;
    for (int v : g.out[best]) residual[v] = 0;
    left -= best_cover;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<int> brute_force_mds(const Digraph& g) {
  const int n = g.size();
  if (n > 25) throw Error(Errc::TooLarge, "brute-force MDS is limited to 25 vertices");
  if (n == 0) return {};
  std::vector<std::uint32_t> closed(n);
  for (int u = 0; u < n; ++u) {
    closed[u] = 1u << u;
    for (int v : g.out[u]) closed[u] |= 1u << v;
  }
  const std::uint32_t all = (1u << n) - 1;
  for (int k = 1; k <= n; ++k) {
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      std::uint32_t cov = 0;
      for (int i : pick) cov |= closed[i];
      if (cov == all) return pick;
      int i = k - 1;
      while (i >= 0 && pick[i] == n - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return {};
}

std::vector<int> exact_mds_cell(const std::vector<BaryCoords>& w, double r, double tol) {
  const int n = static_cast<int>(w.size());
  if (n == 0) return {};
  const int dp1 = w[0].size();
  // local extremum per vertex region: smallest own coordinate, lowest index on ties
  std::vector<int> region(n);
  std::vector<int> extremum(dp1, -1);
  for (int t = 0; t < n; ++t) {
    region[t] = vertex_region_centroid(w[t], tol);
    const int i = region[t];
    if (extremum[i] < 0 || w[t][i] < w[extremum[i]][i]) extremum[i] = t;
  }
  std::vector<int> cand;
  std::vector<double> tau;
  std::vector<int> vert;
  for (int i = 0; i < dp1; ++i) {
    if (extremum[i] < 0) continue;
    cand.push_back(extremum[i]);
    vert.push_back(i);
    tau.push_back(1.0 - r * (1.0 - w[extremum[i]][i]));
  }
  const int m = static_cast<int>(cand.size());
  auto covered = [&](const std::vector<int>& pick) {
    for (int t = 0; t < n; ++t) {
      bool ok = false;
      for (int p : pick) {
        if (cand[p] == t || w[t][vert[p]] >= tau[p] - tol) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };
  for (int k = 1; k <= m; ++k) {
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      if (covered(pick)) {
        std::vector<int> out;
        for (int p : pick) out.push_back(cand[p]);
        return out;
      }
      int i = k - 1;
      while (i >= 0 && pick[i] == m - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return cand;  // not reached: all extrema together dominate the cell
}

PrototypeSet exact_mds_hull(const PointSet& targets, const Tessellation& tess, const TargetLayout& layout, double r,
                            double tol) {
  PrototypeSet s;
  s.cell_gamma.assign(tess.cells().size(), 0);
  for (std::size_t c = 0; c < tess.cells().size(); ++c) {
    const auto& members = layout.by_cell[c];
    if (members.empty()) continue;
    std::vector<BaryCoords> w;
    w.reserve(members.size());
    for (int t : members) w.push_back(BaryCoords{layout.loc[t].coords});
    auto local = exact_mds_cell(w, r, tol);
    s.cell_gamma[c] = static_cast<int>(local.size());
    for (int pos : local) {
      const int t = members[pos];
      s.items.push_back({t, Provenance::InnerExact, static_cast<int>(c),
                         pe_region_inner(tess.cells()[c], static_cast<int>(c), targets[t], r, tol)});
    }
  }
  return s;
}

PrototypeSet exact_mds_hull(const PointSet& targets, const Tessellation& tess, double r, double tol) {
  return exact_mds_hull(targets, tess, layout_targets(tess, targets, tol), r, tol);
}

PrototypeSet standard_mds(const PointSet& targets, const Tessellation& tess, const TargetLayout& layout, double r,
                          double tol) {
  PrototypeSet s = exact_mds_hull(targets, tess, layout, r, tol);
  s.outer_gamma.assign(tess.outer().size(), 0);
  for (std::size_t l = 0; l < tess.outer().size(); ++l) {
    const auto& members = layout.by_outer[l];
    if (members.empty()) continue;
    int best = members[0];
    double best_level = layout.loc[best].coords.sum();
    for (int t : members) {
      const double level = layout.loc[t].coords.sum();
      if (level > best_level) {
        best_level = level;
        best = t;
      }
    }
    s.outer_gamma[l] = 1;
    s.items.push_back({best, Provenance::OuterExact, static_cast<int>(l),
                       pe_region_outer(tess.outer()[l], static_cast<int>(l), targets[best], r, tol)});
  }
  return s;
}

PrototypeSet standard_mds(const PointSet& targets, const Tessellation& tess, double r, double tol) {
  return standard_mds(targets, tess, layout_targets(tess, targets, tol), r, tol);
}

PrototypeSet composite_mds(const PointSet& targets, const PointSet& nontargets, const Tessellation& tess,
                           const TargetLayout& layout, double r, double theta, double tol) {
  PrototypeSet s = exact_mds_hull(targets, tess, layout, r, tol);
  std::vector<int> outside;
  PointSet outside_pts;
  for (int t = 0; t < static_cast<int>(targets.size()); ++t) {
    if (layout.loc[t].in_outer()) {
      outside.push_back(t);
      outside_pts.push_back(targets[t]);
    }
  }
  if (outside.empty()) return s;
  Cccd cccd = build_cccd(outside_pts, nontargets, theta);
  for (int pos : greedy_mds(cccd.graph)) {
    s.items.push_back({outside[pos], Provenance::OuterGreedy, -1, BallRegion{outside_pts[pos], cccd.radius[pos], theta}});
  }
  return s;
}

PrototypeSet composite_mds(const PointSet& targets, const PointSet& nontargets, const Tessellation& tess, double r,
                           double theta, double tol) {
  return composite_mds(targets, nontargets, tess, layout_targets(tess, targets, tol), r, theta, tol);
}

PrototypeSet spherical_mds(const PointSet& targets, const PointSet& nontargets, double theta) {
  PrototypeSet s;
  if (targets.empty()) return s;
  Cccd cccd = build_cccd(targets, nontargets, theta);
  for (int pos : greedy_mds(cccd.graph)) {
    s.items.push_back({pos, Provenance::OuterGreedy, -1, BallRegion{targets[pos], cccd.radius[pos], theta}});
  }
  return s;
}

DominationStats domination_statistics(const PrototypeSet& set, int n_targets) {
  DominationStats st;
  st.cell_gamma = set.cell_gamma;
  st.outer_gamma = set.outer_gamma;
  st.total = static_cast<int>(set.size());
  st.n_targets = n_targets;
  if (n_targets > 0) st.reduction = 1.0 - static_cast<double>(st.total) / n_targets;
  return st;
}

}  // namespace pcd
