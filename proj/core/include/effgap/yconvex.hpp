#pragma once

// Minimum-gap y-convex equipartitions by a left-to-right column sweep.
//
// In a y-convex partition each district meets each column in at most one
// interval. The sweep keeps, per district label, the votes accumulated so
// far, whether the district has started or finished, and its interval in
// the current column. A district stays connected only if its intervals in
// consecutive columns share a row and it never reappears after an empty
// column, so both rules are enforced on every transition.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "effgap/grid.hpp"

namespace effgap {

struct Interval {
  int lo = 0;  // first row, inclusive
  int hi = 0;  // last row, inclusive
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

struct ColumnSegmentation {
  int column = 0;
  std::vector<std::optional<Interval>> segments;  // by label - 1; empty label = nullopt
};

// All ways to cut the column's run of cells into at most kappa labeled
// segments with distinct labels. An empty column yields one segmentation with
// every label empty. Throws std::invalid_argument("column not
// y-convex-compatible") when the column holds two or more separate runs.
std::vector<ColumnSegmentation> enumerate_segmentations(const GridPolygon& p, int column,
                                                        int kappa);

enum class LabelStatus : std::uint8_t { kUnstarted, kActive, kFinished };

struct DPState {
  std::vector<VoteCounts> votes;                 // accumulated per label
  std::vector<LabelStatus> status;               // per label
  std::vector<std::optional<Interval>> current;  // segment in the last column

  static DPState initial(int kappa);
  int started() const;
};

struct Transition {
  bool ok = false;
  std::string reason;  // set when rejected
  DPState next;
};

// Applies one column's segmentation to a state. Rejects on a label that
// was active but shares no row with its new segment, on a finished label
// reappearing, and (when population_cap >= 0) on a label exceeding the cap.
Transition transition_feasible(const GridPolygon& p, const DPState& prev,
                               const ColumnSegmentation& seg, std::int64_t population_cap = -1);

struct YConvexResult {
  bool feasible = false;
  std::int64_t best_scaled_abs = 0;
  GridPartition witness;
  std::vector<std::size_t> states_per_column;

  Rational best() const { return Rational(best_scaled_abs, 2); }
};

// Throws std::invalid_argument when kappa < 1 or some column is not a single
// run. Returns feasible == false when no y-convex kappa-equipartition exists.
YConvexResult solve_yconvex(const GridPolygon& p, int kappa);

}  // namespace effgap
