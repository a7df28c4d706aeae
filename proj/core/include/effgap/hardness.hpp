#pragma once

// Grid instances built from PARTITION inputs. A 3 x (n+1) core rectangle
// carries the numbers; decoy cells of population Delta (three quarters Party
// A, hence zero gap) pad the district count. A zero-gap 2-equipartition of
// the core exists exactly when the numbers split into two equal halves;
// otherwise the best plan has total gap Delta.

#include <cstdint>
#include <span>
#include <vector>

#include "effgap/grid.hpp"

namespace effgap {

// Where the decoy strip attaches. Every placement touches only cells of
// positive population, so no zero-population core cell can join a decoy's
// district.
enum class DecoyPlacement {
  kLeftOfTopRow,     // horizontal strip left of the top-left corner
  kLeftOfMiddleRow,  // horizontal strip left of the first number cell
  kAboveFirstColumn, // vertical strip above the top-left corner
  kAboveThirdColumn, // vertical strip above the second Delta/2 cell
};

DecoyPlacement decoy_placement_for_seed(std::uint64_t seed);

struct HardnessInstance {
  GridPolygon polygon;
  int kappa = 2;
  std::int64_t delta = 0;  // sum of the numbers
  int decoy_count = 0;
  std::vector<std::int64_t> values;  // the numbers, after any scaling
  std::vector<Cell> decoys;
  Cell core_origin;  // grid position of the core's top-left cell

  // Grid cell of core position (row, col), 0 <= row < 3, 0 <= col <= n.
  Cell core_cell(int row, int col) const { return {core_origin.row + row, core_origin.col + col}; }
  GridInstance instance() const { return {polygon, kappa}; }
};

// Requires at least two numbers, all positive and divisible by 4; throws
// std::invalid_argument otherwise (the message suggests scaling by 4).
HardnessInstance gen_hardness_instance(std::span<const std::int64_t> values, int decoy_cells,
                                       std::uint64_t layout_seed);

// Multiplies every number by 4 first.
HardnessInstance gen_hardness_instance_scaled(std::span<const std::int64_t> values,
                                              int decoy_cells, std::uint64_t layout_seed);

// True iff some subset sums to half the total. Empty input and odd totals
// give false. Supports up to 30 numbers.
bool subset_sum_oracle(std::span<const std::int64_t> values);

}  // namespace effgap
