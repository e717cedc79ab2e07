#include "htsne/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "htsne/error.hpp"

namespace htsne {

namespace {

using Candidate = std::pair<double, std::uint32_t>;  // (squared distance, index)

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

// Keeps the k smallest candidates, sorted by (distance, index).
void keep_nearest(std::vector<Candidate>& cands, std::size_t k) {
  if (cands.size() > k) {
    std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k), cands.end());
    cands.resize(k);
  }
  std::sort(cands.begin(), cands.end());
}

void write_row(NeighborGraph& g, std::size_t r, const std::vector<Candidate>& best) {
  for (std::size_t t = 0; t < g.k; ++t) {
    g.ids[r * g.k + t] = best[t].second;
    g.distances[r * g.k + t] = std::sqrt(best[t].first);
  }
}

void check_k(const DataMatrix& data, std::size_t k) {
  if (k == 0) throw InvalidArgument("number of neighbours must be positive");
  if (k >= data.rows()) {
    throw InvalidArgument("number of neighbours K=" + std::to_string(k) +
                          " must be smaller than the number of points n=" +
                          std::to_string(data.rows()));
  }
}

NeighborGraph empty_graph(std::size_t rows, std::size_t k) {
  NeighborGraph g;
  g.k = k;
  g.queries.resize(rows);
  g.ids.resize(rows * k);
  g.distances.resize(rows * k);
  return g;
}

// One random projection tree, stored as the leaf id of every point plus the
// member list of every leaf.
struct ProjectionTree {
  std::vector<std::uint32_t> leaf_of;
  std::vector<std::vector<std::uint32_t>> leaves;
};

ProjectionTree build_tree(const DataMatrix& data, std::size_t leaf_size, std::mt19937_64& rng) {
  const std::size_t n = data.rows();
  const std::size_t dim = data.cols();
  ProjectionTree tree;
  tree.leaf_of.assign(n, 0);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n}};
  std::vector<double> normal(dim);

  while (!stack.empty()) {
    const auto [begin, end] = stack.back();
    stack.pop_back();
    const std::size_t size = end - begin;
    if (size <= leaf_size) {
      const auto leaf_id = static_cast<std::uint32_t>(tree.leaves.size());
      tree.leaves.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                               order.begin() + static_cast<std::ptrdiff_t>(end));
      for (auto p : tree.leaves.back()) tree.leaf_of[p] = leaf_id;
      continue;
    }

    std::uniform_int_distribution<std::size_t> pick(begin, end - 1);
    const auto a = data.row(order[pick(rng)]);
    const auto b = data.row(order[pick(rng)]);
    double offset = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      normal[d] = a[d] - b[d];
      offset += normal[d] * 0.5 * (a[d] + b[d]);
    }

    auto first = order.begin() + static_cast<std::ptrdiff_t>(begin);
    auto last = order.begin() + static_cast<std::ptrdiff_t>(end);
    auto middle = std::partition(first, last, [&](std::uint32_t p) {
      const auto x = data.row(p);
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) s += normal[d] * x[d];
      return s > offset;
    });
    std::size_t split = begin + static_cast<std::size_t>(middle - first);
    // Degenerate hyperplane (duplicates or an unlucky pair): split at random.
    if (split - begin < size / 20 + 1 || end - split < size / 20 + 1) {
      std::shuffle(first, last, rng);
      split = begin + size / 2;
    }
    stack.emplace_back(begin, split);
    stack.emplace_back(split, end);
  }
  return tree;
}

}  // namespace

NeighborGraph exact_neighbors(const DataMatrix& data, std::size_t k,
                              std::span<const std::size_t> queries) {
  check_k(data, k);
  const std::size_t n = data.rows();
  NeighborGraph g = empty_graph(queries.size(), k);
  std::copy(queries.begin(), queries.end(), g.queries.begin());
  const auto rows = static_cast<std::ptrdiff_t>(queries.size());

#pragma omp parallel
  {
    std::vector<Candidate> cands;
    cands.reserve(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      const std::size_t q = queries[static_cast<std::size_t>(r)];
      const auto xq = data.row(q);
      cands.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == q) continue;
        cands.emplace_back(squared_distance(xq, data.row(j)), static_cast<std::uint32_t>(j));
      }
      keep_nearest(cands, k);
      write_row(g, static_cast<std::size_t>(r), cands);
    }
  }
  return g;
}

NeighborGraph find_neighbors(const DataMatrix& data, std::size_t k, NeighborMode mode,
                             std::uint64_t seed, const ForestConfig& forest) {
  validate_data(data);
  check_k(data, k);
  const std::size_t n = data.rows();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (mode == NeighborMode::Exact) return exact_neighbors(data, k, all);

  const std::size_t leaf_size = forest.leaf_size > 0 ? forest.leaf_size : std::max<std::size_t>(2 * k, 32);
  const int n_trees = std::max(1, forest.trees);
  std::mt19937_64 rng(seed);
  std::vector<ProjectionTree> trees;
  trees.reserve(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) trees.push_back(build_tree(data, leaf_size, rng));

  NeighborGraph g = empty_graph(n, k);
  g.queries = all;
  const auto rows = static_cast<std::ptrdiff_t>(n);

  // Candidate gathering with a per-thread visit stamp so each point is
  // measured at most once per query.
  auto search = [&](const auto& gather) {
    NeighborGraph out = empty_graph(n, k);
    out.queries = all;
#pragma omp parallel
    {
      std::vector<std::uint32_t> stamp(n, 0);
      std::uint32_t epoch = 0;
      std::vector<Candidate> cands;
#pragma omp for schedule(dynamic, 64)
      for (std::ptrdiff_t r = 0; r < rows; ++r) {
        const auto i = static_cast<std::size_t>(r);
        const auto xi = data.row(i);
        ++epoch;
        stamp[i] = epoch;
        cands.clear();
        gather(i, [&](std::uint32_t j) {
          if (stamp[j] == epoch) return;
          stamp[j] = epoch;
          cands.emplace_back(squared_distance(xi, data.row(j)), j);
        });
        if (cands.size() < k) {
          // Too few candidates from the forest; fall back to a full scan.
          for (std::size_t j = 0; j < n; ++j) {
            if (stamp[j] == epoch) continue;
            cands.emplace_back(squared_distance(xi, data.row(j)), static_cast<std::uint32_t>(j));
          }
        }
        keep_nearest(cands, k);
        write_row(out, i, cands);
      }
    }
    return out;
  };

  g = search([&](std::size_t i, auto&& visit) {
    for (const auto& tree : trees) {
      for (auto j : tree.leaves[tree.leaf_of[i]]) visit(j);
    }
  });

  if (forest.refine) {
    const NeighborGraph first = g;
    g = search([&](std::size_t i, auto&& visit) {
      for (auto j : first.neighbors(i)) {
        visit(j);
        for (auto m : first.neighbors(j)) visit(m);
      }
    });
  }
  return g;
}

double neighbor_recall(const NeighborGraph& approx, const NeighborGraph& exact) {
  if (approx.k != exact.k || approx.rows() != exact.rows()) {
    throw InvalidArgument("neighbor_recall: graphs have different shapes");
  }
  if (exact.rows() == 0) return 1.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < exact.rows(); ++r) {
    auto truth = exact.neighbors(r);
    std::vector<std::uint32_t> sorted(truth.begin(), truth.end());
    std::sort(sorted.begin(), sorted.end());
    for (auto j : approx.neighbors(r)) {
      if (std::binary_search(sorted.begin(), sorted.end(), j)) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(exact.rows() * exact.k);
}

}  // namespace htsne
