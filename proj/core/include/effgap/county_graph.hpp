#pragma once

// County-fragment adjacency graphs and district plans over them.
//
// Input is a CSV with the columns District, County_id, County, Republicans,
// Democrats, Neighbors. A county split between districts appears once per
// district, and each (District, County_id) pair is its own node. Democrats
// are party A and Republicans party B. Neighbors holds
// `district:county_id` tokens separated by commas (quote the field).

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "effgap/effgap.hpp"

namespace effgap {

struct NodeKey {
  int district = 0;
  std::string county_id;
  friend auto operator<=>(const NodeKey&, const NodeKey&) = default;
};

std::string to_string(const NodeKey& key);  // "district:county_id"
NodeKey parse_node_key(const std::string& text);  // throws std::invalid_argument

struct CountyNode {
  NodeKey key;
  std::string county_name;
  VoteCounts votes;
  int row = 0;  // 1-based data row in the source file, 0 when synthesized
};

// Thrown for malformed input; the message names the offending rows.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CountyGraph {
 public:
  CountyGraph() = default;
  // Nodes are sorted by key; edges are symmetric pairs of node indices.
  CountyGraph(std::vector<CountyNode> nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  std::size_t size() const { return nodes_.size(); }
  const CountyNode& node(std::size_t i) const { return nodes_[i]; }
  std::span<const CountyNode> nodes() const { return nodes_; }
  // Ascending by index, which is ascending by key.
  std::span<const std::size_t> neighbors(std::size_t i) const { return adjacency_[i]; }
  std::optional<std::size_t> index_of(const NodeKey& key) const;
  std::size_t edge_count() const;
  VoteCounts total() const;
  bool connected() const;

  friend bool operator==(const CountyGraph& a, const CountyGraph& b);

 private:
  std::vector<CountyNode> nodes_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

class DistrictPlan {
 public:
  DistrictPlan() = default;
  // Labels in 1..kappa, one per node. Bounds default to the min and max of
  // the resulting district populations.
  DistrictPlan(const CountyGraph& g, std::vector<int> assignment, int kappa,
               std::optional<std::pair<std::int64_t, std::int64_t>> bounds = std::nullopt);

  int kappa() const { return kappa_; }
  int district_of(std::size_t node) const { return assignment_[node]; }
  const std::vector<int>& assignment() const { return assignment_; }
  const VoteCounts& votes(int district) const { return votes_[static_cast<std::size_t>(district - 1)]; }
  std::span<const VoteCounts> district_votes() const { return votes_; }
  std::int64_t pop_lo() const { return lo_; }
  std::int64_t pop_hi() const { return hi_; }
  std::size_t district_size(int district) const { return sizes_[static_cast<std::size_t>(district - 1)]; }

  // Moves one node and updates the cached totals. No legality checks.
  void reassign(const CountyGraph& g, std::size_t node, int district);

  friend bool operator==(const DistrictPlan&, const DistrictPlan&) = default;

 private:
  int kappa_ = 0;
  std::vector<int> assignment_;
  std::vector<VoteCounts> votes_;
  std::vector<std::size_t> sizes_;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
};

struct PlanValidation {
  bool ok = true;
  std::string violation;
  explicit operator bool() const { return ok; }
};

// Every node labeled in range, no district empty or disconnected, every
// population within the plan's bounds, cached totals consistent.
PlanValidation validate_plan(const CountyGraph& g, const DistrictPlan& plan);

// Throws std::invalid_argument when the plan is invalid.
PlanStats plan_stats(const CountyGraph& g, const DistrictPlan& plan);

// True when the nodes of `district` other than `skip` form one connected
// piece (vacuously true when none remain).
bool district_connected(const CountyGraph& g, const DistrictPlan& plan, int district,
                        std::optional<std::size_t> skip = std::nullopt);

struct CountyData {
  CountyGraph graph;
  DistrictPlan plan;                   // the file's districts
  std::vector<int> district_numbers;   // label - 1 -> District value in the file
  std::vector<std::string> warnings;   // e.g. one-sided neighbor listings
};

// Throws DataError on a missing column, duplicate key, unknown neighbor,
// non-numeric or negative votes, a disconnected district or graph.
CountyData ingest_county_csv(std::istream& in);
CountyData load_county_csv(const std::string& path);

// Canonical CSV of the graph: nodes in key order, neighbor lists
// symmetrized and sorted. Ingesting the output reproduces the data.
void write_county_csv(std::ostream& out, const CountyData& data);

// Columns district, county_id, assigned_district; districts are written
// with the file's district numbers.
void write_plan_csv(std::ostream& out, const CountyData& data, const DistrictPlan& plan);
// Reads a plan for `data`, keeping the bounds of data.plan.
DistrictPlan read_plan_csv(std::istream& in, const CountyData& data);

}  // namespace effgap
