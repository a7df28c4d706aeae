// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "effgap/canonical.hpp"
#include "effgap/county_graph.hpp"
#include "effgap/hardness.hpp"
#include "effgap/local_search.hpp"
#include "effgap/oracle.hpp"
#include "effgap/synthetic.hpp"
#include "effgap/yconvex.hpp"
#include "support.hpp"

using namespace effgap;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string secs_text(double secs) {
  std::ostringstream s;
  s.precision(3);
  s << std::fixed << secs << 's';
  return s.str();
}

// Hole-free polygon whose cells all have population `pop`, with a random
// party A share per cell.
GridPolygon uniform_pop_polygon(std::mt19937_64& rng, int cells, int box, std::int64_t pop,
                                bool single_run_columns = false) {
  const GridPolygon shape = testing::random_polygon(rng, cells, box, 1, single_run_columns);
  std::vector<GridCell> out;
  for (const GridCell& c : shape.cells()) {
    const auto a = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(pop + 1));
    out.push_back({c.at, {a, pop - a}});
  }
  return GridPolygon(shape.rows(), shape.cols(), out);
}

struct Equipartition {
  PlanStats stats;
  VoteCounts total;
};

std::vector<Equipartition> g_equipartitions;  // collected by criterion 1 for criterion 3

Outcome criterion1() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  Outcome o;
  int instances = 0, feasible = 0, checked = 0;
  while (instances < 200) {
    const int kappa = 2 + instances % 2;
    const int cells = kappa * (1 + static_cast<int>(rng() % static_cast<std::uint64_t>(10 / kappa)));
    const GridPolygon p = uniform_pop_polygon(rng, cells, 5, 1 + static_cast<std::int64_t>(rng() % 6));
    ++instances;
    const VoteCounts total = p.total();
    const auto values = attainable_values(total.party_a, total.population(), kappa);
    const auto n = enumerate_partitions(
        p, kappa, PopulationMode::exact(), 10,
        [&](const GridPartition& q, std::span<const VoteCounts> votes) {
          const PlanStats s = total_effgap(votes);
          ++checked;
          bool member = false;
          for (const auto& v : values) member = member || v.value == s.effgap();
          // Independent recomputation of the gap from the wasted-vote definition.
          if (!member || testing::naive_total_gap(p, q.labels, kappa) != s.effgap()) o.pass = false;
          g_equipartitions.push_back({s, total});
        });
    if (n > 0) ++feasible;
  }
  const double secs = seconds_since(start);
  if (secs >= 60) o.pass = false;
  o.detail = std::to_string(instances) + " instances, " + std::to_string(feasible) +
             " with equipartitions, " + std::to_string(checked) + " partitions checked, " +
             secs_text(secs);
  if (feasible < 100) o.pass = false;
  return o;
}

Outcome criterion2() {
  std::mt19937_64 rng(202);
  Outcome o;
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t pop = 1 + static_cast<std::int64_t>(rng() % 100000);
    const std::int64_t a = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(pop + 1));
    const int kappa = 1 + static_cast<int>(rng() % 60);
    const auto v = attainable_values(a, pop, kappa);
    for (std::size_t j = 1; j < v.size(); ++j) {
      if (v[j].value - v[j - 1].value > Rational(pop, kappa)) o.pass = false;
    }
    // The set is {|2A - Pop/2 - z Pop/kappa| : z = 0..kappa}; check its size
    // against a direct listing.
    std::vector<Rational> direct;
    for (int z = 0; z <= kappa; ++z) {
      Rational x = Rational(2 * a) - Rational(pop, 2) - Rational(z * pop, kappa);
      direct.push_back(testing::abs_rational(x));
    }
    std::sort(direct.begin(), direct.end());
    direct.erase(std::unique(direct.begin(), direct.end()), direct.end());
    if (direct.size() != v.size()) o.pass = false;
  }
  o.detail = "1000 triples";
  return o;
}

Outcome criterion3() {
  Outcome o;
  for (const Equipartition& e : g_equipartitions) {
    const Rational pop(e.total.population());
    const Rational vm = Rational(e.total.party_a) / pop - Rational(1, 2);
    const Rational sm = Rational(e.stats.seats_a, e.stats.kappa()) - Rational(1, 2);
    const Rational rhs = testing::abs_rational(2 * vm - sm);
    const Margins m = margin_identity(e.stats, e.total);
    if (e.stats.normalized != rhs || m.normalized != rhs) o.pass = false;
  }
  if (g_equipartitions.empty()) o.pass = false;
  o.detail = std::to_string(g_equipartitions.size()) + " equipartitions";
  return o;
}

bool naive_equal_split(const std::vector<std::int64_t>& a) {
  std::int64_t total = 0;
  for (auto x : a) total += x;
  for (std::uint32_t s = 0; s < (1u << a.size()); ++s) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if ((s >> i) & 1u) sum += a[i];
    }
    if (2 * sum == total) return true;
  }
  return false;
}

Outcome criterion4() {
  const auto start = Clock::now();
  std::mt19937_64 rng(404);
  Outcome o;
  int yes = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + rng() % 4;
    std::vector<std::int64_t> a(n);
    for (auto& x : a) x = 1 + static_cast<std::int64_t>(rng() % 40);
    if (i % 2 == 0) {
      // Plant a split: balance the last number against a random side.
      std::int64_t left = 0, right = 0;
      for (std::size_t j = 0; j + 1 < n; ++j) (rng() % 2 ? left : right) += a[j];
      const std::int64_t last = left > right ? left - right : right - left;
      if (last >= 1 && last <= 40) a[n - 1] = last;
    }
    const bool split = subset_sum_oracle(a);
    if (split != naive_equal_split(a)) o.pass = false;
    yes += split;
    const auto h = gen_hardness_instance_scaled(a, 0, rng());
    const auto r = brute_force_opt(h.polygon, h.kappa, PopulationMode::exact(), 24);
    const Rational expected = split ? Rational(0) : Rational(h.delta);
    if (!r.feasible || r.best() != expected) {
      o.pass = false;
      std::cerr << "criterion 4: instance " << i << " expected " << to_string(expected) << " got "
                << (r.feasible ? to_string(r.best()) : "infeasible") << '\n';
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 120) o.pass = false;
  o.detail = "50 inputs (" + std::to_string(yes) + " with an equal split), " +
             secs_text(secs);
  return o;
}

Outcome criterion5() {
  std::mt19937_64 rng(505);
  Outcome o;
  std::uint64_t partitions = 0;
  int instances = 0;
  for (int decoys = 1; decoys <= 2; ++decoys) {
    for (std::uint64_t layout = 0; layout < 4; ++layout) {
      for (int rep = 0; rep < 3; ++rep) {
        std::vector<std::int64_t> a(2 + rng() % 2);
        for (auto& x : a) x = 1 + static_cast<std::int64_t>(rng() % 40);
        const auto h = gen_hardness_instance_scaled(a, decoys, layout);
        ++instances;
        std::vector<std::size_t> decoy_idx;
        for (const Cell& c : h.decoys) decoy_idx.push_back(*h.polygon.index_of(c));
        partitions += enumerate_partitions(
            h.polygon, h.kappa, PopulationMode::exact(), 16,
            [&](const GridPartition& q, std::span<const VoteCounts>) {
              for (std::size_t d : decoy_idx) {
                int same = 0;
                for (int l : q.labels) same += l == q.labels[d];
                if (same != 1) o.pass = false;
              }
            });
      }
    }
  }
  if (partitions == 0) o.pass = false;
  o.detail = std::to_string(instances) + " instances, " + std::to_string(partitions) +
             " equipartitions, all placements";
  return o;
}

Outcome criterion6() {
  const auto start = Clock::now();
  std::mt19937_64 rng(606);
  Outcome o;
  int feasible = 0;
  for (int i = 0; i < 100; ++i) {
    const int kappa = 2 + i % 2;
    const int cells = 4 + static_cast<int>(rng() % 9);
    const GridPolygon p = i % 2 == 0
                              ? uniform_pop_polygon(rng, cells - cells % kappa, 5, 1 + rng() % 4, true)
                              : testing::random_polygon(rng, cells, 5, 3, true);
    if (static_cast<int>(p.size()) < kappa) continue;
    std::optional<std::int64_t> best;
    enumerate_partitions(p, kappa, PopulationMode::exact(), 12,
                         [&](const GridPartition& q, std::span<const VoteCounts> votes) {
                           if (!testing::naive_y_convex(p, q.labels, kappa)) return;
                           const auto g = total_effgap(votes).total_scaled_abs;
                           if (!best || g < *best) best = g;
                         });
    const YConvexResult r = solve_yconvex(p, kappa);
    if (r.feasible != best.has_value() || (best && r.best_scaled_abs != *best)) {
      o.pass = false;
      std::cerr << "criterion 6: instance " << i << " mismatch\n";
    }
    if (r.feasible) {
      ++feasible;
      if (!validate_partition(p, r.witness, kappa, PopulationMode::exact()) ||
          !testing::naive_y_convex(p, r.witness.labels, kappa)) {
        o.pass = false;
      }
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 300) o.pass = false;
  o.detail = "100 polygons, " + std::to_string(feasible) + " feasible, " +
             secs_text(secs);
  return o;
}

Outcome criterion7() {
  const auto start = Clock::now();
  std::mt19937_64 rng(707);
  Outcome o;
  const Rational delta(1, 6);
  const Rational epsilon(1, 3);
  Rational worst_slack(0);
  int i = 0;
  for (int rows = 3; rows <= 6 && i < 20; ++rows) {
    for (int cols = 3; cols <= 6 && i < 20; ++cols) {
      for (int rep = 0; rep < (rows * cols >= 25 ? 2 : 1) && i < 20; ++rep, ++i) {
        const std::int64_t pop = 4;
        std::vector<VoteCounts> v;
        for (int k = 0; k < rows * cols; ++k) {
          const auto a = static_cast<std::int64_t>(rng() % 5);
          v.push_back({a, pop - a});
        }
        const GridPolygon p = GridPolygon::rectangle(rows, cols, v);
        NearStableResult r;
        try {
          r = solve_two_near_stable(p, epsilon, delta);
        } catch (const std::exception& e) {
          o.pass = false;
          std::cerr << "criterion 7: " << rows << "x" << cols << ": " << e.what() << '\n';
          continue;
        }
        const GridPartition& q = r.plan.partition;
        std::vector<bool> one(p.size()), two(p.size());
        for (std::size_t c = 0; c < p.size(); ++c) {
          one[c] = q.labels[c] == 1;
          two[c] = q.labels[c] == 2;
        }
        const bool valid = validate_partition(p, q, 2, PopulationMode::near(delta)).ok &&
                           is_connected(p, one) && is_connected(p, two) &&
                           r.delta_achieved <= r.delta_bound && r.delta_bound == delta &&
                           r.delta_achieved == achieved_delta(r.plan.stats);
        const auto oracle = brute_force_opt(p, 2, PopulationMode::near(delta), 36);
        // Envelope: four times the vote mass of the cells outside the
        // interiors (the cells a canonical rewrite may move).
        std::int64_t mass = 0;
        const auto d = build_decomposition(p, r.t);
        for (std::size_t c = 0; c < p.size(); ++c) {
          if (!d.in_interior[c]) mass += p.votes(c).population();
        }
        const Rational got = r.plan.stats.effgap();
        const bool within = oracle.feasible && got >= oracle.best() && got <= oracle.best() + 4 * mass;
        if (oracle.feasible) worst_slack = std::max(worst_slack, got - oracle.best());
        if (!valid || !within) {
          o.pass = false;
          std::cerr << "criterion 7: " << rows << "x" << cols << " valid=" << valid
                    << " canonical=" << to_string(got)
                    << " oracle=" << (oracle.feasible ? to_string(oracle.best()) : "none") << '\n';
        }
      }
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 600) o.pass = false;
  o.detail = std::to_string(i) + " rectangles, largest gap above oracle " + to_string(worst_slack) +
             ", " + secs_text(secs);
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string data_path(const std::string& name) {
  return std::string(EFFGAP_SOURCE_DIR) + "/data/synthetic/" + name + ".csv";
}

CountyData ingest_text(const std::string& text) {
  std::istringstream in(text);
  return ingest_county_csv(in);
}

Outcome criterion8() {
  Outcome o;
  std::vector<std::pair<std::string, CountyData>> inputs;
  inputs.emplace_back("toy", ingest_text(testing::toy_county_csv()));
  for (const StateProfile& s : state_profiles()) inputs.emplace_back(s.name, load_county_csv(data_path(s.name)));
  std::uint64_t moves = 0;
  for (const auto& [name, d] : inputs) {
    SearchConfig cfg;
    cfg.mu = 100;
    cfg.k = std::min<int>(20, static_cast<int>(d.graph.size()) - 1);
    cfg.seed = 8;
    cfg.replicas = 4;
    cfg.threads = 1;
    std::vector<std::int64_t> last(4, -1);
    bool ok = true;
    const SearchResult a = run_local_search(d.graph, d.plan, cfg, [&](int rep, const Move& m, const DistrictPlan& p) {
      auto& prev = last[static_cast<std::size_t>(rep)];
      if (m.after >= m.before || (prev >= 0 && m.before != prev)) ok = false;
      if (total_effgap(p.district_votes()).total_scaled_abs != m.after) ok = false;
      if (!validate_plan(d.graph, p)) ok = false;
      prev = m.after;
      ++moves;
    });
    for (const auto& rep : a.replicas) {
      std::int64_t prev = rep.initial_scaled;
      for (std::int64_t v : rep.per_iteration) {
        if (v > prev) ok = false;
        prev = v;
      }
    }
    cfg.threads = 4;
    const SearchResult b = run_local_search(d.graph, d.plan, cfg);
    if (format_trace(d.graph, a) != format_trace(d.graph, b)) ok = false;
    if (!ok) {
      o.pass = false;
      std::cerr << "criterion 8: " << name << " failed\n";
    }
  }
  o.detail = std::to_string(inputs.size()) + " inputs, " + std::to_string(moves) + " moves validated";
  return o;
}

Outcome criterion9() {
  Outcome o;
  const std::map<std::string, Rational> target_bound = {
      {"WI", Rational(6, 100)}, {"TX", Rational(4, 100)}, {"VA", Rational(6, 100)}, {"PA", Rational(12, 100)}};
  std::ostringstream detail;
  for (const StateProfile& s : state_profiles()) {
    const CountyData d = load_county_csv(data_path(s.name));
    SearchConfig cfg;
    cfg.seed = 2026;
    cfg.replicas = 10;
    const auto start = Clock::now();
    const SearchResult r = run_local_search(d.graph, d.plan, cfg);
    const double secs = seconds_since(start);
    const Rational before = plan_stats(d.graph, d.plan).normalized;
    const Rational after = plan_stats(d.graph, r.best().plan).normalized;
    const Rational reduction = 1 - after / before;
    if (reduction < Rational(1, 2) || secs > 300) o.pass = false;
    detail << ' ' << s.name << ' ' << format_percent(before) << "%->" << format_percent(after) << "% ("
           << format_percent(reduction, 0) << "% lower"
           << (after <= target_bound.at(s.name) ? ", within" : ", above") << " the "
           << format_percent(target_bound.at(s.name), 0) << "% mark)";
  }
  o.detail = "synthetic states, best of 10, mu=100 k=20:" + detail.str();
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::ostringstream detail;
  for (const StateProfile& s : state_profiles()) {
    const CountyData d = load_county_csv(data_path(s.name));
    const Rational got = plan_stats(d.graph, d.plan).normalized;
    Rational off = got - s.target_gap;
    if (off < 0) off = -off;
    if (off > Rational(5, 10000)) o.pass = false;
    detail << ' ' << s.name << ' ' << format_percent(got) << '%';
  }
  o.detail = "synthetic states:" + detail.str();
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 attainable value set", criterion1},
      {"2 spacing bound", criterion2},
      {"3 margin identity", criterion3},
      {"4 hardness gadget", criterion4},
      {"5 decoy isolation", criterion5},
      {"6 y-convex solver", criterion6},
      {"7 canonical solver", criterion7},
      {"8 local search monotone and deterministic", criterion8},
      {"9 local search reduction", criterion9},
      {"10 ingestion totals", criterion10},
  };
  bool all = true;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
