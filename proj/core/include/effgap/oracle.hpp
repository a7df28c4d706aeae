#pragma once

// Exhaustive enumeration of connected districtings of small grid instances.
// This is the reference every other solver is tested against.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "effgap/effgap.hpp"
#include "effgap/grid.hpp"

namespace effgap {

using CellMask = unsigned __int128;
inline constexpr std::size_t kMaxMaskCells = 128;
inline constexpr std::size_t kDefaultOracleLimit = 14;

inline CellMask bit(std::size_t i) { return CellMask{1} << i; }
int lowest_bit(CellMask m);  // -1 when m == 0
int popcount(CellMask m);

// Adjacency and votes of up to 128 cells as bit masks.
struct MaskGraph {
  std::vector<CellMask> neighbors;
  std::vector<VoteCounts> votes;

  std::size_t size() const { return votes.size(); }
  VoteCounts sum(CellMask m) const;
  std::int64_t population(CellMask m) const { return sum(m).population(); }
  // Cells of `within` reachable from `seed` (seed must be inside `within`).
  CellMask flood(CellMask seed, CellMask within) const;
  bool connected(CellMask m) const;
};

// Throws std::invalid_argument beyond kMaxMaskCells cells.
MaskGraph make_mask_graph(const GridPolygon& p);
// Induced subgraph on `cells` (indices into p), renumbered 0..cells.size()-1.
MaskGraph make_mask_graph(const GridPolygon& p, std::span<const std::size_t> cells);

// Calls visit(mask) once for every connected subset of `allowed` whose
// population is at most `max_population`.
void for_each_connected_subset(const MaskGraph& g, CellMask allowed, std::int64_t max_population,
                               const std::function<void(CellMask)>& visit);

// Every partition of P into kappa connected labeled classes meeting the
// population mode. Class j+1 is the class holding the smallest cell not in
// classes 1..j, so each unlabeled partition is reported exactly once.
// Returns the number of partitions visited. Throws std::invalid_argument when
// |P| exceeds cell_limit or kappa is outside [1, |P|].
std::uint64_t enumerate_partitions(
    const GridPolygon& p, int kappa, const PopulationMode& mode, std::size_t cell_limit,
    const std::function<void(const GridPartition&, std::span<const VoteCounts>)>& visit);

struct BruteForceResult {
  bool feasible = false;
  std::int64_t best_scaled_abs = 0;  // 2 * OPT
  std::vector<GridPartition> optima;
  std::uint64_t partitions_visited = 0;

  Rational best() const { return Rational(best_scaled_abs, 2); }
};

BruteForceResult brute_force_opt(const GridPolygon& p, int kappa, const PopulationMode& mode,
                                 std::size_t cell_limit = kDefaultOracleLimit);

}  // namespace effgap
