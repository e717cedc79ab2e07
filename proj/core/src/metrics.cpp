#include "htsne/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "htsne/error.hpp"

namespace htsne {

namespace {

using Cell = std::pair<std::int64_t, std::int64_t>;

// Points bucketed into square cells of side `h`, sorted by cell.
class PlaneGrid {
 public:
  PlaneGrid(const Embedding& emb, double h) : h_(h) {
    const std::size_t n = emb.size();
    ox_ = std::numeric_limits<double>::infinity();
    oy_ = ox_;
    for (std::size_t i = 0; i < n; ++i) {
      ox_ = std::min(ox_, emb.x(i));
      oy_ = std::min(oy_, emb.y(i));
    }
    entries_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) entries_.emplace_back(cell_of(emb.x(i), emb.y(i)), i);
    std::sort(entries_.begin(), entries_.end());
  }

  Cell cell_of(double x, double y) const {
    return {static_cast<std::int64_t>(std::floor((x - ox_) / h_)),
            static_cast<std::int64_t>(std::floor((y - oy_) / h_))};
  }

  double width() const noexcept { return h_; }

  template <typename F>
  void for_each_in(Cell c, F&& f) const {
    auto lo = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(c, std::size_t{0}));
    for (; lo != entries_.end() && lo->first == c; ++lo) f(lo->second);
  }

 private:
  double h_;
  double ox_ = 0.0;
  double oy_ = 0.0;
  std::vector<std::pair<Cell, std::size_t>> entries_;
};

double dist2(const Embedding& e, std::size_t i, std::size_t j) {
  const double dx = e.x(i) - e.x(j);
  const double dy = e.y(i) - e.y(j);
  return dx * dx + dy * dy;
}

std::vector<std::size_t> query_subset(std::size_t n, std::size_t max_queries, std::uint64_t seed) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (max_queries == 0 || n <= max_queries) return all;
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(max_queries);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

NeighborGraph plane_neighbors(const Embedding& emb, std::size_t k, std::span<const std::size_t> queries) {
  const std::size_t n = emb.size();
  if (k == 0 || k >= n) {
    throw InvalidArgument("k must lie in [1, n-1], got k=" + std::to_string(k) + " with n=" +
                          std::to_string(n));
  }
  if (!emb.all_finite()) throw InvalidInput("embedding contains non-finite values");

  // About two points per cell for uniform data.
  const double span = emb.span();
  const double cells = std::max(1.0, std::ceil(std::sqrt(static_cast<double>(n) / 2.0)));
  const double h = span > 0.0 ? span / cells : 1.0;
  const PlaneGrid grid(emb, h);

  NeighborGraph g;
  g.k = k;
  g.queries.assign(queries.begin(), queries.end());
  g.ids.resize(queries.size() * k);
  g.distances.resize(queries.size() * k);

  const auto rows = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel
  {
    std::vector<std::pair<double, std::uint32_t>> cands;
#pragma omp for schedule(dynamic, 64)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      const std::size_t q = queries[static_cast<std::size_t>(r)];
      const Cell home = grid.cell_of(emb.x(q), emb.y(q));
      cands.clear();
      for (std::int64_t ring = 0;; ++ring) {
        auto visit = [&](std::int64_t cx, std::int64_t cy) {
          grid.for_each_in({cx, cy}, [&](std::size_t j) {
            if (j != q) cands.emplace_back(dist2(emb, q, j), static_cast<std::uint32_t>(j));
          });
        };
        if (ring == 0) {
          visit(home.first, home.second);
        } else {
          for (std::int64_t d = -ring; d <= ring; ++d) {
            visit(home.first + d, home.second - ring);
            visit(home.first + d, home.second + ring);
          }
          for (std::int64_t d = -ring + 1; d <= ring - 1; ++d) {
            visit(home.first - ring, home.second + d);
            visit(home.first + ring, home.second + d);
          }
        }
        if (cands.size() >= k) {
          std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k - 1), cands.end());
          const double reach = static_cast<double>(ring) * grid.width();
          // Anything outside the searched block is farther than `reach`.
          if (cands[k - 1].first < reach * reach || cands.size() == n - 1) break;
        }
        if (cands.size() == n - 1) break;
      }
      std::sort(cands.begin(), cands.end());
      for (std::size_t t = 0; t < k; ++t) {
        g.ids[static_cast<std::size_t>(r) * k + t] = cands[t].second;
        g.distances[static_cast<std::size_t>(r) * k + t] = std::sqrt(cands[t].first);
      }
    }
  }
  return g;
}

NeighborGraph plane_neighbors(const Embedding& emb, std::size_t k) {
  std::vector<std::size_t> all(emb.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return plane_neighbors(emb, k, all);
}

std::map<std::size_t, double> knn_preservation(const DataMatrix& data, const Embedding& emb,
                                               const std::vector<std::size_t>& ks,
                                               std::size_t max_queries, std::uint64_t seed) {
  const std::size_t n = data.rows();
  if (emb.size() != n) {
    throw InvalidArgument("data has " + std::to_string(n) + " rows but the embedding has " +
                          std::to_string(emb.size()) + " points");
  }
  if (ks.empty()) return {};
  validate_data(data);
  const std::size_t kmax = *std::max_element(ks.begin(), ks.end());
  for (std::size_t k : ks) {
    if (k == 0 || k >= n) {
      throw InvalidArgument("k must lie in [1, n-1], got k=" + std::to_string(k) + " with n=" +
                            std::to_string(n));
    }
  }

  const auto queries = query_subset(n, max_queries, seed);
  const NeighborGraph high = exact_neighbors(data, kmax, queries);
  const NeighborGraph low = plane_neighbors(emb, kmax, queries);

  std::map<std::size_t, double> out;
  std::vector<std::uint32_t> a, b, common;
  for (std::size_t k : ks) {
    double total = 0.0;
    for (std::size_t r = 0; r < queries.size(); ++r) {
      const auto hn = high.neighbors(r);
      const auto ln = low.neighbors(r);
      a.assign(hn.begin(), hn.begin() + static_cast<std::ptrdiff_t>(k));
      b.assign(ln.begin(), ln.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      common.clear();
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
      total += static_cast<double>(common.size()) / static_cast<double>(k);
    }
    out[k] = total / static_cast<double>(queries.size());
  }
  return out;
}

double knn_preservation(const DataMatrix& data, const Embedding& emb, std::size_t k,
                        std::size_t max_queries, std::uint64_t seed) {
  return knn_preservation(data, emb, std::vector<std::size_t>{k}, max_queries, seed).at(k);
}

double separation_ratio(const Embedding& emb, const Labels& labels, int cluster_a, int cluster_b) {
  if (labels.size() != emb.size()) throw InvalidArgument("one label per point is required");
  std::vector<std::size_t> members[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cluster_a) members[0].push_back(i);
    if (labels[i] == cluster_b) members[1].push_back(i);
  }
  const int ids[2] = {cluster_a, cluster_b};
  double cx[2], cy[2];
  double within = 0.0;
  double pairs = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto& m = members[c];
    if (m.size() < 2) {
      throw InvalidArgument("cluster " + std::to_string(ids[c]) + " has " + std::to_string(m.size()) +
                            " point(s); the within-cluster distance needs at least two");
    }
    cx[c] = 0.0;
    cy[c] = 0.0;
    for (std::size_t i : m) {
      cx[c] += emb.x(i);
      cy[c] += emb.y(i);
    }
    cx[c] /= static_cast<double>(m.size());
    cy[c] /= static_cast<double>(m.size());
    for (std::size_t s = 0; s < m.size(); ++s) {
      for (std::size_t t = s + 1; t < m.size(); ++t) within += dist2(emb, m[s], m[t]);
    }
    pairs += 0.5 * static_cast<double>(m.size()) * static_cast<double>(m.size() - 1);
  }
  const double rms = std::sqrt(within / pairs);
  const double between = std::hypot(cx[0] - cx[1], cy[0] - cy[1]);
  if (rms == 0.0) {
    if (between == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return between / rms;
}

double mean_separation_ratio(const Embedding& emb, const Labels& labels) {
  const auto classes = distinct_labels(labels);
  if (classes.size() < 2) throw InvalidArgument("separation needs at least two labelled classes");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      sum += separation_ratio(emb, labels, classes[a], classes[b]);
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

DbscanResult dbscan_clusters(const Embedding& emb, double eps, int min_pts) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("DBSCAN eps must be positive");
  if (min_pts < 1) throw InvalidArgument("DBSCAN min_pts must be positive");
  const std::size_t n = emb.size();
  if (n < static_cast<std::size_t>(min_pts)) {
    throw InvalidArgument("DBSCAN needs at least min_pts=" + std::to_string(min_pts) + " points, got " +
                          std::to_string(n));
  }
  if (!emb.all_finite()) throw InvalidInput("embedding contains non-finite values");

  const PlaneGrid grid(emb, eps);
  const double eps2 = eps * eps;
  auto for_each_neighbor = [&](std::size_t i, auto&& f) {
    const Cell c = grid.cell_of(emb.x(i), emb.y(i));
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        grid.for_each_in({c.first + dx, c.second + dy}, [&](std::size_t j) {
          if (dist2(emb, i, j) <= eps2) f(j);
        });
      }
    }
  };

  std::vector<char> core(n, 0);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    int count = 0;
    for_each_neighbor(i, [&](std::size_t) { ++count; });
    core[i] = count >= min_pts ? 1 : 0;
  }

  // Union-find over core-core links.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for_each_neighbor(i, [&](std::size_t j) {
      if (!core[j]) return;
      const std::size_t a = find(i);
      const std::size_t b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    });
  }

  DbscanResult out;
  out.assignments.assign(n, -1);
  std::vector<int> id_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const std::size_t root = find(i);
    if (id_of_root[root] < 0) id_of_root[root] = out.cluster_count++;
    out.assignments[i] = id_of_root[root];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = n;
    for_each_neighbor(i, [&](std::size_t j) {
      if (!core[j]) return;
      const double d = dist2(emb, i, j);
      if (d < best || (d == best && j < nearest)) {
        best = d;
        nearest = j;
      }
    });
    if (nearest < n) {
      out.assignments[i] = out.assignments[nearest];
    } else {
      ++out.noise;
    }
  }
  return out;
}

double adaptive_eps(const Embedding& emb, std::size_t k, double factor) {
  if (!(factor > 0.0)) throw InvalidArgument("eps factor must be positive");
  const NeighborGraph g = plane_neighbors(emb, k);
  std::vector<double> kth(emb.size());
  for (std::size_t r = 0; r < g.rows(); ++r) kth[r] = g.distances_of(r)[k - 1];
  const std::size_t mid = kth.size() / 2;
  std::nth_element(kth.begin(), kth.begin() + static_cast<std::ptrdiff_t>(mid), kth.end());
  double median = kth[mid];
  if (kth.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(kth.begin(), kth.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  const double eps = factor * median;
  if (!(eps > 0.0)) throw InvalidInput("adaptive eps is zero; the embedding has too many coincident points");
  return eps;
}

std::vector<ClusterProfile> cluster_mean_profiles(const DataMatrix& data, const Labels& assignments) {
  if (assignments.size() != data.rows()) {
    throw InvalidArgument("assignments has " + std::to_string(assignments.size()) +
                          " entries but data has " + std::to_string(data.rows()) + " rows");
  }
  std::map<int, ClusterProfile> groups;
  const std::size_t dim = data.cols();
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const int label = assignments[i];
    if (label < 0) continue;
    auto& g = groups[label];
    if (g.mean.empty()) {
      g.label = label;
      g.mean.assign(dim, 0.0);
    }
    ++g.size;
    const auto row = data.row(i);
    for (std::size_t c = 0; c < dim; ++c) g.mean[c] += row[c];
  }
  std::vector<ClusterProfile> out;
  out.reserve(groups.size());
  for (auto& [label, g] : groups) {
    for (double& v : g.mean) v /= static_cast<double>(g.size);
    out.push_back(std::move(g));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ClusterProfile& a, const ClusterProfile& b) { return a.size > b.size; });
  return out;
}

}  // namespace htsne
