#pragma once

// Grid instances: a hole-free rectilinear polygon made of unit cells on an
// m x n grid, each cell carrying its two-party vote counts, and labelings of
// its cells into districts.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "effgap/effgap.hpp"
#include "effgap/rational.hpp"

namespace effgap {

struct Cell {
  int row = 0;
  int col = 0;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

struct GridCell {
  Cell at;
  VoteCounts votes;
};

class GridPolygon {
 public:
  GridPolygon() = default;
  // Cells may be given in any order; they are stored row-major. Throws
  // std::invalid_argument for out-of-range or repeated coordinates and for
  // negative vote counts. Shape invariants are checked by validate_polygon.
  GridPolygon(int rows, int cols, std::vector<GridCell> cells);

  // Full rows x cols rectangle with votes given row-major.
  static GridPolygon rectangle(int rows, int cols, std::span<const VoteCounts> votes);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  const Cell& cell(std::size_t i) const { return cells_[i].at; }
  const VoteCounts& votes(std::size_t i) const { return cells_[i].votes; }
  std::span<const GridCell> cells() const { return cells_; }
  std::optional<std::size_t> index_of(Cell c) const;
  bool contains(Cell c) const { return index_of(c).has_value(); }

  // 4-neighbors inside the polygon, ascending by index.
  std::span<const std::size_t> neighbors(std::size_t i) const { return adjacency_[i]; }

  VoteCounts total() const;
  std::int64_t max_cell_population() const;
  bool is_full_rectangle() const {
    return cells_.size() == static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  }

  friend bool operator==(const GridPolygon& a, const GridPolygon& b);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<GridCell> cells_;
  std::vector<int> index_;  // rows*cols, -1 outside the polygon
  std::vector<std::vector<std::size_t>> adjacency_;
};

// Cell index -> district label in 1..kappa.
struct GridPartition {
  std::vector<int> labels;
  friend bool operator==(const GridPartition&, const GridPartition&) = default;
};

struct ValidationReport {
  bool ok = true;
  std::string violation;
  std::optional<Cell> witness;

  explicit operator bool() const { return ok; }
  static ValidationReport pass() { return {}; }
  static ValidationReport fail(std::string what, std::optional<Cell> where = std::nullopt) {
    return {false, std::move(what), where};
  }
};

// Admissible district populations: exactly Pop/kappa, or within
// [(1/kappa - delta) Pop, (1/kappa + delta) Pop].
class PopulationMode {
 public:
  static PopulationMode exact() { return PopulationMode(false, Rational(0)); }
  static PopulationMode near(Rational delta);

  bool is_exact() const { return !near_; }
  const Rational& delta() const { return delta_; }

  // Integer population bounds for one district, or nullopt when no integer
  // population qualifies (exact mode with Pop not divisible by kappa).
  struct Window {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    bool contains(std::int64_t pop) const { return lo <= pop && pop <= hi; }
  };
  std::optional<Window> window(std::int64_t total_pop, int kappa) const;

  std::string describe() const;

 private:
  PopulationMode(bool near, Rational delta) : near_(near), delta_(delta) {}
  bool near_ = false;
  Rational delta_{0};
};

ValidationReport validate_polygon(const GridPolygon& p);

// Throws std::invalid_argument unless 1 < kappa <= |P|.
ValidationReport validate_partition(const GridPolygon& p, const GridPartition& q, int kappa,
                                    const PopulationMode& mode);

// True when the marked cells form one 4-connected piece (false when none
// are marked).
bool is_connected(const GridPolygon& p, const std::vector<bool>& member);

// Connected, and the cells outside it (including everything beyond the
// grid) form one piece, i.e. the marked region has no holes.
bool is_simply_connected(const GridPolygon& p, const std::vector<bool>& member);

// Each label class meets every column in at most one contiguous interval.
bool is_y_convex(const GridPolygon& p, const GridPartition& q, int kappa);

// Per-label vote totals, labels 1..kappa mapped to positions 0..kappa-1.
std::vector<VoteCounts> district_votes(const GridPolygon& p, const GridPartition& q, int kappa);

PlanStats partition_stats(const GridPolygon& p, const GridPartition& q, int kappa);

// Text format: header "m n kappa", then one "row col party_a party_b" line
// per cell in row-major order. Blank lines and '#' comments are skipped on
// input; output is canonical so write(read(text)) reproduces canonical text.
struct GridInstance {
  GridPolygon polygon;
  int kappa = 2;
  friend bool operator==(const GridInstance&, const GridInstance&) = default;
};

GridInstance read_grid_instance(std::istream& in);
void write_grid_instance(std::ostream& out, const GridInstance& instance);
GridInstance load_grid_instance(const std::string& path);

// "row col label" lines in row-major order.
void write_partition(std::ostream& out, const GridPolygon& p, const GridPartition& q);
GridPartition read_partition(std::istream& in, const GridPolygon& p);

// Fixed-width picture of a labeling, '.' outside the polygon.
std::string render_partition(const GridPolygon& p, const GridPartition& q);

}  // namespace effgap
