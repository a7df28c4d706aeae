#include "effgap/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace effgap {

int lowest_bit(CellMask m) {
  if (m == 0) return -1;
  const auto lo = static_cast<std::uint64_t>(m);
  if (lo != 0) return __builtin_ctzll(lo);
  return 64 + __builtin_ctzll(static_cast<std::uint64_t>(m >> 64));
}

int popcount(CellMask m) {
  return __builtin_popcountll(static_cast<std::uint64_t>(m)) +
         __builtin_popcountll(static_cast<std::uint64_t>(m >> 64));
}

VoteCounts MaskGraph::sum(CellMask m) const {
  VoteCounts out;
  while (m != 0) {
    const int i = lowest_bit(m);
    m &= m - 1;
    out += votes[static_cast<std::size_t>(i)];
  }
  return out;
}

CellMask MaskGraph::flood(CellMask seed, CellMask within) const {
  CellMask reached = seed & within;
  CellMask fresh = reached;
  while (fresh != 0) {
    CellMask grow = 0;
    while (fresh != 0) {
      const int i = lowest_bit(fresh);
      fresh &= fresh - 1;
      grow |= neighbors[static_cast<std::size_t>(i)];
    }
    fresh = grow & within & ~reached;
    reached |= fresh;
  }
  return reached;
}

bool MaskGraph::connected(CellMask m) const {
  if (m == 0) return false;
  return flood(bit(static_cast<std::size_t>(lowest_bit(m))), m) == m;
}

MaskGraph make_mask_graph(const GridPolygon& p) {
  std::vector<std::size_t> all(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) all[i] = i;
  return make_mask_graph(p, all);
}

MaskGraph make_mask_graph(const GridPolygon& p, std::span<const std::size_t> cells) {
  if (cells.size() > kMaxMaskCells) {
    throw std::invalid_argument("at most " + std::to_string(kMaxMaskCells) +
                                " cells fit in a cell mask");
  }
  std::vector<int> local(p.size(), -1);
  for (std::size_t k = 0; k < cells.size(); ++k) local[cells[k]] = static_cast<int>(k);
  MaskGraph g;
  g.neighbors.assign(cells.size(), 0);
  g.votes.resize(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    g.votes[k] = p.votes(cells[k]);
    for (std::size_t u : p.neighbors(cells[k])) {
      if (local[u] >= 0) g.neighbors[k] |= bit(static_cast<std::size_t>(local[u]));
    }
  }
  return g;
}

namespace {

// Grows connected sets containing a fixed root by branching on the lowest
// frontier cell: include it, or exclude it for the rest of the branch. Each
// connected set is reached at exactly one leaf.
class SubsetGrower {
 public:
  SubsetGrower(const MaskGraph& g, CellMask allowed, std::int64_t max_pop)
      : g_(g), allowed_(allowed), max_pop_(max_pop) {}

  // prune(selected, excluded) -> true to cut the branch; leaf(selected, pop).
  template <class Prune, class Leaf>
  void grow(CellMask selected, CellMask excluded, CellMask touched, std::int64_t pop,
            Prune& prune, Leaf& leaf) {
    if (pop > max_pop_) return;
    if (prune(selected, excluded)) return;
    const CellMask frontier = touched & allowed_ & ~selected & ~excluded;
    if (frontier == 0) {
      leaf(selected, pop);
      return;
    }
    const auto v = static_cast<std::size_t>(lowest_bit(frontier));
    grow(selected | bit(v), excluded, touched | g_.neighbors[v], pop + g_.votes[v].population(),
         prune, leaf);
    grow(selected, excluded | bit(v), touched, pop, prune, leaf);
  }

 private:
  const MaskGraph& g_;
  CellMask allowed_;
  std::int64_t max_pop_;
};

}  // namespace

void for_each_connected_subset(const MaskGraph& g, CellMask allowed, std::int64_t max_population,
                               const std::function<void(CellMask)>& visit) {
  SubsetGrower grower(g, allowed, max_population);
  auto no_prune = [](CellMask, CellMask) { return false; };
  auto leaf = [&](CellMask s, std::int64_t) { visit(s); };
  CellMask below = 0;
  for (CellMask rest = allowed; rest != 0; rest &= rest - 1) {
    const auto root = static_cast<std::size_t>(lowest_bit(rest));
    grower.grow(bit(root), below, g.neighbors[root], g.votes[root].population(), no_prune, leaf);
    below |= bit(root);
  }
}

namespace {

class PartitionEnumerator {
 public:
  using Visit = std::function<void(const GridPartition&, std::span<const VoteCounts>)>;

  PartitionEnumerator(const MaskGraph& g, int kappa, PopulationMode::Window window,
                      const Visit& visit)
      : g_(g), kappa_(kappa), window_(window), visit_(visit) {
    labels_.labels.assign(g.size(), 0);
    part_votes_.resize(static_cast<std::size_t>(kappa));
  }

  std::uint64_t run() {
    const CellMask all = g_.size() == kMaxMaskCells ? ~CellMask{0} : bit(g_.size()) - 1;
    place(0, all);
    return visited_;
  }

 private:
  void assign(int part, CellMask cells, const VoteCounts& votes) {
    for (CellMask m = cells; m != 0; m &= m - 1) {
      labels_.labels[static_cast<std::size_t>(lowest_bit(m))] = part + 1;
    }
    part_votes_[static_cast<std::size_t>(part)] = votes;
  }

  // False once more than `limit` components of `rest` contain an excluded
  // cell. Excluded cells never rejoin the growing class, so each such
  // component needs a district of its own.
  bool components_fit(CellMask rest, CellMask excluded, int limit) const {
    int count = 0;
    CellMask pending = excluded & rest;
    while (pending != 0) {
      const CellMask comp = g_.flood(bit(static_cast<std::size_t>(lowest_bit(pending))), rest);
      if (++count > limit) return false;
      pending &= ~comp;
    }
    return true;
  }

  void place(int part, CellMask unassigned) {
    const int parts_left = kappa_ - part;
    if (parts_left == 1) {
      const VoteCounts votes = g_.sum(unassigned);
      if (unassigned != 0 && window_.contains(votes.population()) && g_.connected(unassigned)) {
        assign(part, unassigned, votes);
        ++visited_;
        visit_(labels_, part_votes_);
      }
      return;
    }
    const std::int64_t unassigned_pop = g_.population(unassigned);
    // Later classes need at least window_.lo each.
    const std::int64_t cap =
        std::min(window_.hi, unassigned_pop - static_cast<std::int64_t>(parts_left - 1) * window_.lo);
    if (cap < window_.lo) return;
    if (popcount(unassigned) < parts_left) return;

    const auto root = static_cast<std::size_t>(lowest_bit(unassigned));
    SubsetGrower grower(g_, unassigned, cap);
    auto prune = [&](CellMask selected, CellMask excluded) {
      return excluded != 0 && !components_fit(unassigned & ~selected, excluded, parts_left - 1);
    };
    auto leaf = [&](CellMask selected, std::int64_t pop) {
      if (pop < window_.lo) return;
      const CellMask rest = unassigned & ~selected;
      if (popcount(rest) < parts_left - 1) return;
      // Every remaining component must hold whole districts.
      int comps = 0;
      CellMask pending = rest;
      while (pending != 0) {
        const CellMask comp = g_.flood(bit(static_cast<std::size_t>(lowest_bit(pending))), rest);
        const std::int64_t comp_pop = g_.population(comp);
        if (++comps > parts_left - 1 || comp_pop < window_.lo) return;
        pending &= ~comp;
      }
      assign(part, selected, g_.sum(selected));
      place(part + 1, rest);
    };
    grower.grow(bit(root), 0, g_.neighbors[root], g_.votes[root].population(), prune, leaf);
  }

  const MaskGraph& g_;
  int kappa_;
  PopulationMode::Window window_;
  const Visit& visit_;
  GridPartition labels_;
  std::vector<VoteCounts> part_votes_;
  std::uint64_t visited_ = 0;
};

}  // namespace

std::uint64_t enumerate_partitions(
    const GridPolygon& p, int kappa, const PopulationMode& mode, std::size_t cell_limit,
    const std::function<void(const GridPartition&, std::span<const VoteCounts>)>& visit) {
  if (p.size() > cell_limit || p.size() > kMaxMaskCells) {
    throw std::invalid_argument("instance too large for oracle (" + std::to_string(p.size()) +
                                " cells, limit " +
                                std::to_string(std::min(cell_limit, kMaxMaskCells)) + ")");
  }
  if (kappa < 1 || static_cast<std::size_t>(kappa) > p.size()) {
    throw std::invalid_argument("kappa must lie in [1, |P|]");
  }
  const auto window = mode.window(p.total().population(), kappa);
  if (!window) return 0;
  const MaskGraph g = make_mask_graph(p);
  PartitionEnumerator e(g, kappa, *window, visit);
  return e.run();
}

BruteForceResult brute_force_opt(const GridPolygon& p, int kappa, const PopulationMode& mode,
                                 std::size_t cell_limit) {
  BruteForceResult result;
  result.partitions_visited = enumerate_partitions(
      p, kappa, mode, cell_limit, [&](const GridPartition& q, std::span<const VoteCounts> parts) {
        const std::int64_t value = total_effgap(parts).total_scaled_abs;
        if (!result.feasible || value < result.best_scaled_abs) {
          result.feasible = true;
          result.best_scaled_abs = value;
          result.optima.clear();
        }
        if (value == result.best_scaled_abs) result.optima.push_back(q);
      });
  return result;
}

}  // namespace effgap
