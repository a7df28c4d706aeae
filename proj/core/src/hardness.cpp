#include "effgap/hardness.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace effgap {

DecoyPlacement decoy_placement_for_seed(std::uint64_t seed) {
  switch (seed % 4) {
    case 0: return DecoyPlacement::kLeftOfTopRow;
    case 1: return DecoyPlacement::kLeftOfMiddleRow;
    case 2: return DecoyPlacement::kAboveFirstColumn;
    default: return DecoyPlacement::kAboveThirdColumn;
  }
}

HardnessInstance gen_hardness_instance(std::span<const std::int64_t> values, int decoy_cells,
                                       std::uint64_t layout_seed) {
  if (values.size() < 2) {
    throw std::invalid_argument("need at least two numbers (the core uses three columns)");
  }
  if (decoy_cells < 0) throw std::invalid_argument("decoy count must be non-negative");
  std::int64_t delta = 0;
  for (std::int64_t a : values) {
    if (a <= 0) throw std::invalid_argument("numbers must be positive");
    if (a % 4 != 0) {
      throw std::invalid_argument("number " + std::to_string(a) +
                                  " is not divisible by 4; scale inputs by 4");
    }
    delta += a;
  }
  const int n = static_cast<int>(values.size());
  const DecoyPlacement placement = decoy_placement_for_seed(layout_seed);
  const bool horizontal = placement == DecoyPlacement::kLeftOfTopRow ||
                          placement == DecoyPlacement::kLeftOfMiddleRow;

  HardnessInstance h;
  h.delta = delta;
  h.decoy_count = decoy_cells;
  h.kappa = 2 + decoy_cells;
  h.values.assign(values.begin(), values.end());
  h.core_origin = horizontal ? Cell{0, decoy_cells} : Cell{decoy_cells, 0};
  const int rows = 3 + (horizontal ? 0 : decoy_cells);
  const int cols = n + 1 + (horizontal ? decoy_cells : 0);

  std::vector<GridCell> cells;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c <= n; ++c) {
      VoteCounts v;
      if (r == 0 && c == 0) {
        v = {delta / 2, 0};
      } else if (r == 0 && c == 2) {
        v = {0, delta / 2};
      } else if (r == 1 && c < n) {
        const std::int64_t a = values[static_cast<std::size_t>(c)];
        v = {a / 2, a - a / 2};
      }
      cells.push_back({h.core_cell(r, c), v});
    }
  }
  const VoteCounts decoy{3 * delta / 4, delta - 3 * delta / 4};
  for (int k = 1; k <= decoy_cells; ++k) {
    Cell at;
    switch (placement) {
      case DecoyPlacement::kLeftOfTopRow: at = h.core_cell(0, -k); break;
      case DecoyPlacement::kLeftOfMiddleRow: at = h.core_cell(1, -k); break;
      case DecoyPlacement::kAboveFirstColumn: at = h.core_cell(-k, 0); break;
      case DecoyPlacement::kAboveThirdColumn: at = h.core_cell(-k, 2); break;
    }
    cells.push_back({at, decoy});
    h.decoys.push_back(at);
  }
  std::sort(h.decoys.begin(), h.decoys.end());
  h.polygon = GridPolygon(rows, cols, std::move(cells));
  return h;
}

HardnessInstance gen_hardness_instance_scaled(std::span<const std::int64_t> values,
                                              int decoy_cells, std::uint64_t layout_seed) {
  std::vector<std::int64_t> scaled(values.begin(), values.end());
  for (auto& a : scaled) a *= 4;
  return gen_hardness_instance(scaled, decoy_cells, layout_seed);
}

namespace {

std::vector<std::int64_t> subset_sums(std::span<const std::int64_t> values) {
  std::vector<std::int64_t> sums{0};
  for (std::int64_t a : values) {
    const std::size_t n = sums.size();
    for (std::size_t i = 0; i < n; ++i) sums.push_back(sums[i] + a);
  }
  std::sort(sums.begin(), sums.end());
  return sums;
}

}  // namespace

bool subset_sum_oracle(std::span<const std::int64_t> values) {
  if (values.empty()) return false;
  if (values.size() > 30) throw std::invalid_argument("subset-sum oracle supports at most 30 numbers");
  std::int64_t total = 0;
  for (std::int64_t a : values) total += a;
  if (total % 2 != 0) return false;
  const std::int64_t target = total / 2;
  // Meet in the middle over the two halves.
  const std::size_t half = values.size() / 2;
  const auto left = subset_sums(values.subspan(0, half));
  const auto right = subset_sums(values.subspan(half));
  for (std::int64_t s : left) {
    if (std::binary_search(right.begin(), right.end(), target - s)) return true;
  }
  return false;
}

}  // namespace effgap
