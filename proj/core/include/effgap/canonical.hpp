#pragma once

// Two-district plans with approximately equal populations on full
// rectangles, restricted to canonical form.
//
// The grid is cut into t x t basic rectangles (the last band and the last
// column block absorb the remainder). The basic tree T holds the top row, the
// left column, and each rectangle's bottom row and right column, with a gap
// just below the top of every right column. Interiors are the cells at
// Chebyshev distance >= 2 from T. A canonical plan puts T in district 1,
// plus any interior cells, where each interior component is hooked to T
// through one connector cell. Everything else goes to district 2.
//
// The polygon's own right column stays out of T (apart from its top cell),
// so the non-tree cells of every band connect along it and district 2 can be
// connected.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "effgap/grid.hpp"

namespace effgap {

struct BasicRectangle {
  int row0 = 0, row1 = 0;  // inclusive
  int col0 = 0, col1 = 0;  // inclusive
  std::vector<std::size_t> cells;     // polygon indices, row-major
  std::vector<std::size_t> interior;  // subset of cells
};

struct BasicDecomposition {
  int t = 0;
  std::vector<BasicRectangle> rectangles;  // band by band, left to right
  std::vector<bool> in_tree;               // by polygon cell index
  std::vector<bool> in_interior;           // by polygon cell index

  std::vector<std::size_t> tree_cells() const;
};

// Requires a full rectangle with no empty cells and t >= 3. Throws
// std::invalid_argument otherwise.
BasicDecomposition build_decomposition(const GridPolygon& p, int t);

// District populations allowed for each of the two parts.
struct PopulationWindow {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool contains(std::int64_t pop) const { return lo <= pop && pop <= hi; }
};

// [(1/2 - delta) Pop, (1/2 + delta) Pop] rounded inward.
PopulationWindow near_window(std::int64_t total_pop, const Rational& delta);

struct TwoDistrictPlan {
  GridPartition partition;  // labels 1 (district 1) and 2
  PlanStats stats;
};

// Marks the (PartyA, PartyB) totals reachable by the interior choices of the
// rectangles seen so far. A mark remembers the rectangle and subset that set
// it first; marks are never removed.
class ReachTable {
 public:
  struct Mark {
    int rectangle = -1;  // -1 for the starting (0, 0) mark
    std::uint32_t subset = 0;  // position in that rectangle's interior_choices
  };

  ReachTable();
  bool marked(std::int64_t a, std::int64_t b) const { return marks_.count({a, b}) != 0; }
  // Sets the mark unless present; returns whether it was new.
  bool try_mark(std::int64_t a, std::int64_t b, Mark m) { return marks_.emplace(std::pair{a, b}, m).second; }
  std::size_t size() const { return marks_.size(); }
  const std::map<std::pair<std::int64_t, std::int64_t>, Mark>& marks() const { return marks_; }

 private:
  std::map<std::pair<std::int64_t, std::int64_t>, Mark> marks_;
};

// One admissible choice of interior cells inside one basic rectangle.
struct InteriorChoice {
  std::uint32_t subset = 0;  // bit k selects rectangle.interior[k]
  std::vector<std::size_t> connectors;
  VoteCounts added;  // chosen cells plus connectors
};

// Every interior subset whose components each have a connector: a
// non-tree, non-interior cell of the rectangle adjacent to both the
// component and T (the smallest such cell is used). Includes the empty set.
std::vector<InteriorChoice> interior_choices(const GridPolygon& p, const BasicDecomposition& d,
                                             std::size_t rectangle);

// Runs the reachability pass; `after_each` sees the table after each
// rectangle.
ReachTable build_reach_table(
    const GridPolygon& p, const BasicDecomposition& d,
    const std::function<void(std::size_t, const ReachTable&)>& after_each = {});

// Best plan in which one district is a connected subset of a single basic
// rectangle, both populations lie in the window and the other district is
// connected. Requires t*t <= 25.
std::optional<TwoDistrictPlan> solve_case1(const GridPolygon& p, int t,
                                           const PopulationWindow& window);

// Best canonical plan with both populations in the window whose districts
// are connected and district 1 has no holes. Throws std::runtime_error("no
// canonical plan in window") when there is none. Requires t*t <= 25.
TwoDistrictPlan solve_canonical(const GridPolygon& p, int t, const PopulationWindow& window);

// min_i Effgap(Q_i) / Pop(Q_i); a plan is gamma-stable iff gamma is below it.
Rational stability_margin(const PlanStats& stats);
bool is_gamma_stable(const PlanStats& stats, const Rational& gamma);

// max_i |Pop(Q_i) / Pop(P) - 1/kappa|.
Rational achieved_delta(const PlanStats& stats);

struct NearStableResult {
  TwoDistrictPlan plan;
  std::string source;  // "case1" or "canonical"
  int t = 0;
  Rational epsilon;
  std::int64_t max_cell_population = 0;
  Rational delta_bound;     // nearness the search was allowed
  Rational delta_achieved;  // nearness of the returned plan
  Rational stability;       // stability_margin of the returned plan
};

// t = max(3, ceil(1/epsilon)); the window uses delta_bound, defaulting to
// min(1/2, epsilon * C) with C the largest cell population. Returns the
// better of the case-1 and canonical plans. Throws std::invalid_argument
// when t*t > 25 (use a larger epsilon) and std::runtime_error when neither
// search finds a plan.
NearStableResult solve_two_near_stable(const GridPolygon& p, const Rational& epsilon,
                                       std::optional<Rational> delta_bound = std::nullopt);

}  // namespace effgap
