#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "effgap/local_search.hpp"
#include "effgap/synthetic.hpp"
#include "support.hpp"

namespace effgap {
namespace {

// 2 x 3 block, districts {0, 1, 3} and {2, 4, 5} in row-major cell order.
// Only one legal move improves the gap: cell 1 into district 2.
std::string six_node_csv() {
  const int district[6] = {1, 1, 2, 1, 2, 2};
  const VoteCounts votes[6] = {{3, 9}, {6, 0}, {3, 0}, {6, 2}, {0, 2}, {7, 8}};
  auto key = [&](int i) { return std::to_string(district[i]) + ":c" + std::to_string(i); };
  std::ostringstream out;
  out << "District,County_id,County,Republicans,Democrats,Neighbors\n";
  for (int i = 0; i < 6; ++i) {
    const int r = i / 3, c = i % 3;
    std::string nb;
    if (c > 0) nb += key(i - 1) + ",";
    if (c < 2) nb += key(i + 1) + ",";
    nb += key(r == 0 ? i + 3 : i - 3);
    out << district[i] << ",c" << i << ",Cell " << i << ',' << votes[i].party_b << ','
        << votes[i].party_a << ",\"" << nb << "\"\n";
  }
  return out.str();
}

CountyData ingest(const std::string& text) {
  std::istringstream in(text);
  return ingest_county_csv(in);
}

std::size_t node(const CountyData& d, const std::string& key) {
  return *d.graph.index_of(parse_node_key(key));
}

std::int64_t scaled(const DistrictPlan& plan) {
  return total_effgap(plan.district_votes()).total_scaled_abs;
}

TEST(Rng, SeedDerivationAndRanges) {
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xe220a8397b1dcdafULL);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7u);
  for (int i = 0; i < 100; ++i) {
    const double u = rng.unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  const auto s = rng.sample(10, 10);
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 10u);
  EXPECT_TRUE(rng.sample(5, 0).empty());
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(a.below(1000), b.below(1000));
  EXPECT_EQ(a.sample(100, 20), b.sample(100, 20));
}

TEST(MoveLegality, Reasons) {
  const CountyData d = ingest(six_node_csv());
  const DistrictPlan& plan = d.plan;
  EXPECT_EQ(plan.pop_lo(), 20);
  EXPECT_EQ(plan.pop_hi(), 26);
  EXPECT_TRUE(move_is_legal(d.graph, plan, node(d, "1:c1"), 2).ok);
  EXPECT_EQ(move_is_legal(d.graph, plan, node(d, "1:c1"), 3).reason, "target out of range");
  EXPECT_EQ(move_is_legal(d.graph, plan, node(d, "1:c1"), 1).reason, "same district");
  EXPECT_EQ(move_is_legal(d.graph, plan, node(d, "1:c0"), 2).reason, "not adjacent to target");
  EXPECT_EQ(move_is_legal(d.graph, plan, node(d, "1:c3"), 2).reason, "population out of bounds");

  // Assignments below are in key order: c0, c1, c3, c2, c4, c5.
  const std::pair<std::int64_t, std::int64_t> wide{0, 1000};
  const DistrictPlan lone(d.graph, {1, 2, 2, 2, 2, 2}, 2, wide);
  EXPECT_EQ(move_is_legal(d.graph, lone, node(d, "1:c0"), 2).reason, "district emptied");
  // Top row in district 2: c1 is the only link between c0 and c2.
  const DistrictPlan rows(d.graph, {2, 2, 1, 2, 1, 1}, 2, wide);
  ASSERT_TRUE(validate_plan(d.graph, rows).ok);
  EXPECT_EQ(move_is_legal(d.graph, rows, node(d, "1:c1"), 1).reason, "source disconnected");
  EXPECT_TRUE(move_is_legal(d.graph, rows, node(d, "1:c0"), 1).ok);
}

TEST(Iteration, ZeroDrawIsNoOp) {
  const CountyData d = ingest(six_node_csv());
  DistrictPlan plan = d.plan;
  Rng rng(1);
  std::int64_t sum = total_effgap(plan.district_votes()).signed_scaled_sum;
  for (int it = 0; it < 20; ++it) {
    EXPECT_TRUE(run_iteration(d.graph, plan, rng, 0, it, false, sum).empty());
  }
  EXPECT_EQ(plan, d.plan);
}

TEST(Iteration, UniqueImprovingMoveIsTaken) {
  const CountyData d = ingest(six_node_csv());
  // Enumerate every legal single move to confirm the fixture.
  const std::int64_t start = scaled(d.plan);
  EXPECT_EQ(start, 38);
  std::vector<std::pair<std::size_t, int>> improving;
  for (std::size_t v = 0; v < d.graph.size(); ++v) {
    for (int target = 1; target <= 2; ++target) {
      if (!move_is_legal(d.graph, d.plan, v, target)) continue;
      DistrictPlan p = d.plan;
      p.reassign(d.graph, v, target);
      ASSERT_TRUE(validate_plan(d.graph, p).ok);
      if (scaled(p) < start) improving.emplace_back(v, target);
    }
  }
  ASSERT_EQ(improving.size(), 1u);
  EXPECT_EQ(improving[0], (std::pair<std::size_t, int>{node(d, "1:c1"), 2}));

  int taken = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DistrictPlan plan = d.plan;
    Rng rng(seed);
    std::int64_t sum = total_effgap(plan.district_votes()).signed_scaled_sum;
    const auto moves = run_iteration(d.graph, plan, rng, 5, 0, false, sum);
    if (moves.empty()) continue;
    ++taken;
    EXPECT_EQ(moves[0].node, node(d, "1:c1"));
    EXPECT_EQ(moves[0].to, 2);
    EXPECT_EQ(moves[0].before, 38);
    EXPECT_EQ(moves[0].after, 2);
    EXPECT_EQ(std::llabs(sum), scaled(plan));
  }
  EXPECT_GT(taken, 0);
}

TEST(Iteration, OnlyBoundaryNodesMove) {
  // 3 x 3 block; district 2 starts as the top-right corner, so the middle
  // cell is interior until a neighbor of it changes district.
  std::ostringstream csv;
  csv << "District,County_id,County,Republicans,Democrats,Neighbors\n";
  auto key = [](int i) { return std::string(i == 2 ? "2" : "1") + ":" + std::to_string(i); };
  for (int i = 0; i < 9; ++i) {
    const int r = i / 3, c = i % 3;
    std::string nb;
    if (r > 0) nb += key(i - 3) + ",";
    if (r < 2) nb += key(i + 3) + ",";
    if (c > 0) nb += key(i - 1) + ",";
    if (c < 2) nb += key(i + 1) + ",";
    nb.pop_back();
    csv << (i == 2 ? 2 : 1) << ',' << i << ",X," << 1 + i << ',' << 9 - i << ",\"" << nb << "\"\n";
  }
  const CountyData d = ingest(csv.str());
  const DistrictPlan plan(d.graph, d.plan.assignment(), 2, std::pair<std::int64_t, std::int64_t>{0, 1000});
  int moves = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    DistrictPlan p = plan;
    Rng rng(seed);
    std::int64_t sum = total_effgap(p.district_votes()).signed_scaled_sum;
    std::vector<int> before = p.assignment();
    run_iteration(d.graph, p, rng, 8, 0, false, sum, [&](const Move& m, const DistrictPlan& now) {
      // The node had a neighbor in the target district when it moved.
      bool touching = false;
      for (std::size_t u : d.graph.neighbors(m.node)) touching = touching || before[u] == m.to;
      EXPECT_TRUE(touching);
      before = now.assignment();
      ++moves;
    });
  }
  EXPECT_GT(moves, 0);
}

TEST(Search, RejectsBadInput) {
  const CountyData d = ingest(six_node_csv());
  SearchConfig cfg;
  cfg.k = 6;
  EXPECT_THROW(run_local_search(d.graph, d.plan, cfg), std::invalid_argument);
  cfg.k = 2;
  cfg.mu = 0;
  EXPECT_THROW(run_local_search(d.graph, d.plan, cfg), std::invalid_argument);
  cfg.mu = 1;
  const DistrictPlan broken(d.graph, {1, 2, 2, 1, 1, 2}, 2);  // district 1 = c0, c2, c4
  EXPECT_THROW(run_local_search(d.graph, broken, cfg), std::invalid_argument);
}

SearchResult search(const CountyData& d, std::uint64_t seed, int threads, int replicas = 4) {
  SearchConfig cfg;
  cfg.mu = 30;
  cfg.k = std::min<int>(20, static_cast<int>(d.graph.size()) - 1);
  cfg.seed = seed;
  cfg.replicas = replicas;
  cfg.threads = threads;
  return run_local_search(d.graph, d.plan, cfg);
}

TEST(Search, DeterministicAcrossRunsAndThreads) {
  const CountyData d = ingest(synthesize_state_csv(state_profile("WI")));
  const SearchResult one = search(d, 7, 1);
  const SearchResult many = search(d, 7, 4);
  EXPECT_EQ(format_trace(d.graph, one), format_trace(d.graph, many));
  EXPECT_EQ(format_trace(d.graph, one), format_trace(d.graph, search(d, 7, 1)));
  EXPECT_EQ(one.best().plan, many.best().plan);
  EXPECT_NE(format_trace(d.graph, one), format_trace(d.graph, search(d, 8, 1)));
}

TEST(Search, MonotoneAndValid) {
  const CountyData d = ingest(synthesize_state_csv(state_profile("VA")));
  SearchConfig cfg;
  cfg.mu = 40;
  cfg.seed = 3;
  cfg.replicas = 3;
  cfg.threads = 1;
  std::vector<std::int64_t> last(3, -1);
  int checked = 0;
  const SearchResult r = run_local_search(d.graph, d.plan, cfg, [&](int rep, const Move& m, const DistrictPlan& p) {
    EXPECT_LT(m.after, m.before);
    if (last[static_cast<std::size_t>(rep)] >= 0) EXPECT_EQ(m.before, last[static_cast<std::size_t>(rep)]);
    last[static_cast<std::size_t>(rep)] = m.after;
    EXPECT_EQ(scaled(p), m.after);
    EXPECT_TRUE(validate_plan(d.graph, p).ok);
    ++checked;
  });
  EXPECT_GT(checked, 0);
  for (const auto& rep : r.replicas) {
    std::int64_t prev = rep.initial_scaled;
    for (std::int64_t v : rep.per_iteration) {
      EXPECT_LE(v, prev);
      prev = v;
    }
    EXPECT_EQ(rep.final_scaled, scaled(rep.plan));
    EXPECT_LE(rep.final_scaled, rep.initial_scaled);
    EXPECT_GE(rep.final_scaled, r.best().final_scaled);
  }
}

TEST(Search, BestImprovementAlsoMonotone) {
  const CountyData d = ingest(synthesize_state_csv(state_profile("WI")));
  SearchConfig cfg;
  cfg.mu = 20;
  cfg.seed = 11;
  cfg.best_improvement = true;
  const SearchResult r = run_local_search(d.graph, d.plan, cfg);
  EXPECT_LE(r.best().final_scaled, r.best().initial_scaled);
  EXPECT_TRUE(validate_plan(d.graph, r.best().plan).ok);
}

TEST(Search, RelabelingKeepsGapSequence) {
  // Swapping district labels 1 and 2 changes no scan order: neighbors are
  // visited by node key and the gap does not depend on labels.
  const CountyData d = ingest(synthesize_state_csv(state_profile("WI")));
  std::vector<int> swapped = d.plan.assignment();
  for (int& l : swapped) l = l == 1 ? 2 : l == 2 ? 1 : l;
  const DistrictPlan relabeled(d.graph, swapped, d.plan.kappa(),
                               std::pair{d.plan.pop_lo(), d.plan.pop_hi()});
  SearchConfig cfg;
  cfg.mu = 30;
  cfg.seed = 5;
  const SearchResult a = run_local_search(d.graph, d.plan, cfg);
  const SearchResult b = run_local_search(d.graph, relabeled, cfg);
  EXPECT_EQ(a.best().per_iteration, b.best().per_iteration);
}

TEST(Search, TraceFormat) {
  const CountyData d = ingest(six_node_csv());
  SearchConfig cfg;
  cfg.mu = 5;
  cfg.k = 5;
  cfg.seed = 2;
  const SearchResult r = run_local_search(d.graph, d.plan, cfg);
  const std::string trace = format_trace(d.graph, r);
  EXPECT_NE(trace.find("replica 0 seed="), std::string::npos);
  EXPECT_NE(trace.find("best replica=0"), std::string::npos);
}

}  // namespace
}  // namespace effgap
