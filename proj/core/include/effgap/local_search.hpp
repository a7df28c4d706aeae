#pragma once

// Randomized local search over district plans.
//
// Each of mu iterations draws r uniformly from {0..k}, then r distinct nodes.
// A drawn node on a district boundary tries the districts of its neighbors,
// scanned in key order, and takes the first move that keeps every district
// connected, non-empty and within the population bounds of the starting plan
// while strictly lowering the total efficiency gap. A node is considered at
// most once per iteration. No approximation guarantee exists for this
// procedure; it only ever improves the starting plan.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "effgap/county_graph.hpp"
#include "effgap/rng.hpp"

namespace effgap {

struct SearchConfig {
  int mu = 100;
  int k = 20;
  std::uint64_t seed = 0;
  int replicas = 1;
  int threads = 0;                 // 0: hardware concurrency
  bool best_improvement = false;   // take the best improving neighbor move instead of the first
};

// Throws std::invalid_argument unless mu >= 1, replicas >= 1, 0 <= k < nodes.
void check_config(const SearchConfig& cfg, std::size_t node_count);

struct Move {
  int iteration = 0;
  std::size_t node = 0;
  int from = 0;
  int to = 0;
  std::int64_t before = 0;  // 2 * Effgap before the move
  std::int64_t after = 0;
  friend bool operator==(const Move&, const Move&) = default;
};

struct MoveCheck {
  bool ok = false;
  std::string reason;  // set when rejected
  explicit operator bool() const { return ok; }
};

MoveCheck move_is_legal(const CountyGraph& g, const DistrictPlan& plan, std::size_t node,
                        int target);

// Signed sum of scaled district gaps after moving `node` to `target`, given
// the current sum (plan unchanged). Its absolute value is 2 * Effgap.
std::int64_t signed_sum_after(const CountyGraph& g, const DistrictPlan& plan, std::size_t node,
                              int target, std::int64_t signed_sum);

// Called after each accepted move with the updated plan.
using AcceptHook = std::function<void(const Move&, const DistrictPlan&)>;

// Runs one iteration in place. `signed_sum` is the plan's signed scaled gap
// sum and is kept current. Returns the accepted moves.
std::vector<Move> run_iteration(const CountyGraph& g, DistrictPlan& plan, Rng& rng, int k,
                                int iteration, bool best_improvement, std::int64_t& signed_sum,
                                const AcceptHook& on_accept = {});

struct ReplicaResult {
  int replica = 0;
  std::uint64_t seed = 0;
  std::int64_t initial_scaled = 0;
  std::int64_t final_scaled = 0;
  std::vector<Move> moves;
  std::vector<std::int64_t> per_iteration;  // 2 * Effgap after each iteration
  DistrictPlan plan;
  double wall_seconds = 0;
};

struct SearchResult {
  int best_replica = 0;
  std::vector<ReplicaResult> replicas;

  const ReplicaResult& best() const { return replicas[static_cast<std::size_t>(best_replica)]; }
};

// Throws std::invalid_argument when plan0 fails validation or the config is
// bad. Replicas run on up to cfg.threads threads; the result does not depend
// on the thread count. `on_accept` may be called concurrently from several
// replicas.
SearchResult run_local_search(const CountyGraph& g, const DistrictPlan& plan0,
                              const SearchConfig& cfg,
                              const std::function<void(int, const Move&, const DistrictPlan&)>&
                                  on_accept = {});

// One line per accepted move, "replica iteration node from to before after",
// then one summary line per replica. No timing, so equal runs give equal
// text.
std::string format_trace(const CountyGraph& g, const SearchResult& result);

}  // namespace effgap
