#include "effgap/local_search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace effgap {

void check_config(const SearchConfig& cfg, std::size_t node_count) {
  if (cfg.mu < 1) throw std::invalid_argument("mu must be at least 1");
  if (cfg.replicas < 1) throw std::invalid_argument("replicas must be at least 1");
  if (cfg.threads < 0) throw std::invalid_argument("threads must be non-negative");
  if (cfg.k < 0 || static_cast<std::size_t>(cfg.k) >= node_count) {
    throw std::invalid_argument("k must satisfy 0 <= k < number of nodes (" +
                                std::to_string(node_count) + ")");
  }
}

MoveCheck move_is_legal(const CountyGraph& g, const DistrictPlan& plan, std::size_t node,
                        int target) {
  const int from = plan.district_of(node);
  if (target < 1 || target > plan.kappa()) return {false, "target out of range"};
  if (target == from) return {false, "same district"};
  const auto nb = g.neighbors(node);
  if (std::none_of(nb.begin(), nb.end(), [&](std::size_t u) { return plan.district_of(u) == target; })) {
    return {false, "not adjacent to target"};
  }
  if (plan.district_size(from) <= 1) return {false, "district emptied"};
  const std::int64_t pop = g.node(node).votes.population();
  if (plan.votes(from).population() - pop < plan.pop_lo() ||
      plan.votes(target).population() + pop > plan.pop_hi()) {
    return {false, "population out of bounds"};
  }
  if (!district_connected(g, plan, from, node)) return {false, "source disconnected"};
  return {true, {}};
}

std::int64_t signed_sum_after(const CountyGraph& g, const DistrictPlan& plan, std::size_t node,
                              int target, std::int64_t signed_sum) {
  const int from = plan.district_of(node);
  const VoteCounts& v = g.node(node).votes;
  const VoteCounts& src = plan.votes(from);
  const VoteCounts& dst = plan.votes(target);
  return signed_sum - district_effgap(src).value - district_effgap(dst).value +
         district_effgap(src - v).value + district_effgap(dst + v).value;
}

std::vector<Move> run_iteration(const CountyGraph& g, DistrictPlan& plan, Rng& rng, int k,
                                int iteration, bool best_improvement, std::int64_t& signed_sum,
                                const AcceptHook& on_accept) {
  std::vector<Move> accepted;
  const auto r = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(k) + 1));
  const std::vector<std::size_t> drawn = rng.sample(g.size(), r);
  std::vector<bool> done(g.size(), false);
  for (std::size_t v : drawn) {
    if (done[v]) continue;
    done[v] = true;
    const int from = plan.district_of(v);
    const auto nb = g.neighbors(v);
    if (std::all_of(nb.begin(), nb.end(), [&](std::size_t u) { return plan.district_of(u) == from; })) {
      continue;
    }
    const std::int64_t current = std::llabs(signed_sum);
    std::vector<int> tried;
    std::optional<std::pair<int, std::int64_t>> choice;  // target, signed sum after
    for (std::size_t u : nb) {
      const int target = plan.district_of(u);
      if (target == from || std::find(tried.begin(), tried.end(), target) != tried.end()) continue;
      tried.push_back(target);
      if (!move_is_legal(g, plan, v, target)) continue;
      const std::int64_t after = signed_sum_after(g, plan, v, target, signed_sum);
      if (std::llabs(after) >= current) continue;
      if (!choice || std::llabs(after) < std::llabs(choice->second)) choice = {target, after};
      if (!best_improvement) break;
    }
    if (!choice) continue;
    const Move move{iteration, v, from, choice->first, current, std::llabs(choice->second)};
    plan.reassign(g, v, choice->first);
    signed_sum = choice->second;
    accepted.push_back(move);
    if (on_accept) on_accept(move, plan);
  }
  return accepted;
}

SearchResult run_local_search(
    const CountyGraph& g, const DistrictPlan& plan0, const SearchConfig& cfg,
    const std::function<void(int, const Move&, const DistrictPlan&)>& on_accept) {
  check_config(cfg, g.size());
  if (const auto v = validate_plan(g, plan0); !v) {
    throw std::invalid_argument("initial plan invalid: " + v.violation);
  }
  SearchResult result;
  result.replicas.resize(static_cast<std::size_t>(cfg.replicas));

  auto run_one = [&](int index) {
    ReplicaResult& rep = result.replicas[static_cast<std::size_t>(index)];
    const auto start = std::chrono::steady_clock::now();
    rep.replica = index;
    rep.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
    rep.plan = plan0;
    Rng rng(rep.seed);
    std::int64_t signed_sum = total_effgap(rep.plan.district_votes()).signed_scaled_sum;
    rep.initial_scaled = std::llabs(signed_sum);
    AcceptHook hook;
    if (on_accept) hook = [&](const Move& m, const DistrictPlan& p) { on_accept(index, m, p); };
    for (int it = 0; it < cfg.mu; ++it) {
      auto moves = run_iteration(g, rep.plan, rng, cfg.k, it, cfg.best_improvement, signed_sum, hook);
      rep.moves.insert(rep.moves.end(), moves.begin(), moves.end());
      rep.per_iteration.push_back(std::llabs(signed_sum));
    }
    rep.final_scaled = std::llabs(signed_sum);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.replicas));
  if (threads <= 1) {
    for (int i = 0; i < cfg.replicas; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = next++; i < cfg.replicas; i = next++) run_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (const ReplicaResult& rep : result.replicas) {
    if (rep.final_scaled < result.best().final_scaled) result.best_replica = rep.replica;
  }
  return result;
}

std::string format_trace(const CountyGraph& g, const SearchResult& result) {
  std::ostringstream out;
  for (const ReplicaResult& rep : result.replicas) {
    for (const Move& m : rep.moves) {
      out << "move replica=" << rep.replica << " iteration=" << m.iteration
          << " node=" << to_string(g.node(m.node).key) << " from=" << m.from << " to=" << m.to
          << " before=" << m.before << " after=" << m.after << '\n';
    }
    out << "replica " << rep.replica << " seed=" << rep.seed << " initial=" << rep.initial_scaled
        << " final=" << rep.final_scaled << " moves=" << rep.moves.size() << '\n';
  }
  out << "best replica=" << result.best_replica << " final=" << result.best().final_scaled << '\n';
  return out.str();
}

}  // namespace effgap
