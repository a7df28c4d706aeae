#include "effgap/canonical.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "effgap/oracle.hpp"

namespace effgap {

namespace {

constexpr std::size_t kMaxInteriorCells = 25;
constexpr std::size_t kMaxCase1Cells = 30;

// Start rows (or columns) of the blocks along one axis; the last block runs
// to the end.
std::vector<std::pair<int, int>> blocks(int extent, int t) {
  const int count = std::max(1, extent / t);
  std::vector<std::pair<int, int>> out;
  for (int b = 0; b < count; ++b) {
    out.emplace_back(b * t, b == count - 1 ? extent - 1 : b * t + t - 1);
  }
  return out;
}

void require_small(int t) {
  if (t * t > 25) {
    throw std::invalid_argument("t = " + std::to_string(t) +
                                " is too large (t*t must be at most 25); use a larger epsilon");
  }
}

TwoDistrictPlan make_plan(const GridPolygon& p, std::vector<int> labels) {
  TwoDistrictPlan plan;
  plan.partition.labels = std::move(labels);
  plan.stats = partition_stats(p, plan.partition, 2);
  return plan;
}

bool plan_connected(const GridPolygon& p, const std::vector<int>& labels) {
  std::vector<bool> one(p.size());
  std::vector<bool> two(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    one[i] = labels[i] == 1;
    two[i] = labels[i] == 2;
  }
  return is_connected(p, one) && is_connected(p, two);
}

}  // namespace

std::vector<std::size_t> BasicDecomposition::tree_cells() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < in_tree.size(); ++i) {
    if (in_tree[i]) out.push_back(i);
  }
  return out;
}

BasicDecomposition build_decomposition(const GridPolygon& p, int t) {
  if (t < 3) throw std::invalid_argument("t must be at least 3");
  if (p.empty() || !p.is_full_rectangle()) {
    throw std::invalid_argument("canonical solver needs a full rectangle");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.votes(i).population() < 1) {
      throw std::invalid_argument("canonical solver needs every cell to have population >= 1");
    }
  }
  const int m = p.rows();
  const int n = p.cols();
  auto at = [&](int r, int c) { return static_cast<std::size_t>(r * n + c); };

  BasicDecomposition d;
  d.t = t;
  d.in_tree.assign(p.size(), false);
  d.in_interior.assign(p.size(), false);
  for (int c = 0; c < n; ++c) d.in_tree[at(0, c)] = true;
  for (int r = 0; r < m; ++r) d.in_tree[at(r, 0)] = true;

  for (const auto& [r0, r1] : blocks(m, t)) {
    for (const auto& [c0, c1] : blocks(n, t)) {
      BasicRectangle rect{r0, r1, c0, c1, {}, {}};
      const bool rightmost = c1 == n - 1;
      for (int c = c0; c <= c1; ++c) {
        if (!(rightmost && c == n - 1)) d.in_tree[at(r1, c)] = true;
      }
      if (!rightmost) {
        for (int r = r0; r <= r1; ++r) {
          if (r != r0 + 1) d.in_tree[at(r, c1)] = true;
        }
      }
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) rect.cells.push_back(at(r, c));
      }
      d.rectangles.push_back(std::move(rect));
    }
  }

  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) {
      bool near_tree = false;
      for (int dr = -1; dr <= 1 && !near_tree; ++dr) {
        for (int dc = -1; dc <= 1 && !near_tree; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr >= 0 && rr < m && cc >= 0 && cc < n && d.in_tree[at(rr, cc)]) near_tree = true;
        }
      }
      d.in_interior[at(r, c)] = !near_tree;
    }
  }
  for (BasicRectangle& rect : d.rectangles) {
    for (std::size_t i : rect.cells) {
      if (d.in_interior[i]) rect.interior.push_back(i);
    }
  }
  return d;
}

PopulationWindow near_window(std::int64_t total_pop, const Rational& delta) {
  const auto w = PopulationMode::near(delta).window(total_pop, 2);
  if (!w) return {1, 0};
  return {w->lo, w->hi};
}

ReachTable::ReachTable() { marks_.emplace(std::pair<std::int64_t, std::int64_t>{0, 0}, Mark{}); }

std::vector<InteriorChoice> interior_choices(const GridPolygon& p, const BasicDecomposition& d,
                                             std::size_t rectangle) {
  const BasicRectangle& rect = d.rectangles.at(rectangle);
  const std::size_t k = rect.interior.size();
  if (k > kMaxInteriorCells) {
    throw std::invalid_argument("basic rectangle interior has " + std::to_string(k) +
                                " cells; at most 25 supported");
  }
  // Local adjacency between interior cells.
  std::vector<std::uint32_t> adj(k, 0);
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) {
      const auto nb = p.neighbors(rect.interior[x]);
      if (std::find(nb.begin(), nb.end(), rect.interior[y]) != nb.end()) adj[x] |= 1u << y;
    }
  }
  // Candidate connectors: rectangle cells outside T and the interior that
  // touch T, in row-major order.
  std::vector<std::size_t> candidates;
  for (std::size_t i : rect.cells) {
    if (d.in_tree[i] || d.in_interior[i]) continue;
    const auto nb = p.neighbors(i);
    if (std::any_of(nb.begin(), nb.end(), [&](std::size_t u) { return d.in_tree[u]; })) {
      candidates.push_back(i);
    }
  }

  std::vector<InteriorChoice> out;
  const std::uint64_t limit = std::uint64_t{1} << k;
  for (std::uint64_t s = 0; s < limit; ++s) {
    const auto subset = static_cast<std::uint32_t>(s);
    InteriorChoice choice;
    choice.subset = subset;
    std::uint32_t left = subset;
    bool ok = true;
    while (left != 0 && ok) {
      std::uint32_t comp = left & (~left + 1);
      for (;;) {
        std::uint32_t grown = comp;
        for (std::size_t x = 0; x < k; ++x) {
          if (comp & (1u << x)) grown |= adj[x] & subset;
        }
        if (grown == comp) break;
        comp = grown;
      }
      left &= ~comp;
      std::optional<std::size_t> connector;
      for (std::size_t c : candidates) {
        const auto nb = p.neighbors(c);
        for (std::size_t x = 0; x < k && !connector; ++x) {
          if ((comp & (1u << x)) && std::find(nb.begin(), nb.end(), rect.interior[x]) != nb.end()) {
            connector = c;
          }
        }
        if (connector) break;
      }
      if (!connector) {
        ok = false;
      } else if (std::find(choice.connectors.begin(), choice.connectors.end(), *connector) ==
                 choice.connectors.end()) {
        choice.connectors.push_back(*connector);
      }
    }
    if (!ok) continue;
    for (std::size_t x = 0; x < k; ++x) {
      if (subset & (1u << x)) choice.added += p.votes(rect.interior[x]);
    }
    std::sort(choice.connectors.begin(), choice.connectors.end());
    for (std::size_t c : choice.connectors) choice.added += p.votes(c);
    out.push_back(std::move(choice));
  }
  return out;
}

namespace {

ReachTable run_reach(const GridPolygon& p, const BasicDecomposition& d,
                     const std::vector<std::vector<InteriorChoice>>& choices,
                     const std::function<void(std::size_t, const ReachTable&)>& after_each) {
  ReachTable table;
  for (std::size_t r = 0; r < d.rectangles.size(); ++r) {
    // Extend only marks that existed before this rectangle, so each
    // rectangle contributes at most one choice.
    const auto snapshot = table.marks();
    for (std::size_t s = 0; s < choices[r].size(); ++s) {
      const VoteCounts& add = choices[r][s].added;
      if (add.population() == 0) continue;
      for (const auto& [key, mark] : snapshot) {
        table.try_mark(key.first + add.party_a, key.second + add.party_b,
                       {static_cast<int>(r), static_cast<std::uint32_t>(s)});
      }
    }
    if (after_each) after_each(r, table);
  }
  (void)p;
  return table;
}

std::vector<std::vector<InteriorChoice>> all_choices(const GridPolygon& p,
                                                     const BasicDecomposition& d) {
  std::vector<std::vector<InteriorChoice>> out;
  for (std::size_t r = 0; r < d.rectangles.size(); ++r) out.push_back(interior_choices(p, d, r));
  return out;
}

}  // namespace

ReachTable build_reach_table(const GridPolygon& p, const BasicDecomposition& d,
                             const std::function<void(std::size_t, const ReachTable&)>& after_each) {
  return run_reach(p, d, all_choices(p, d), after_each);
}

std::optional<TwoDistrictPlan> solve_case1(const GridPolygon& p, int t,
                                           const PopulationWindow& window) {
  require_small(t);
  const BasicDecomposition d = build_decomposition(p, t);
  const std::int64_t total = p.total().population();

  std::optional<TwoDistrictPlan> best;
  std::optional<std::vector<int>> best_labels;
  std::int64_t best_value = 0;
  for (const BasicRectangle& rect : d.rectangles) {
    VoteCounts block;
    for (std::size_t i : rect.cells) block += p.votes(i);
    if (block.population() < window.lo) continue;
    if (rect.cells.size() > kMaxCase1Cells) {
      throw std::invalid_argument("basic rectangle with " + std::to_string(rect.cells.size()) +
                                  " cells is too large for the case-1 search; choose a smaller t");
    }
    const MaskGraph g = make_mask_graph(p, rect.cells);
    const CellMask all = (CellMask{1} << rect.cells.size()) - 1;
    for_each_connected_subset(g, all, window.hi, [&](CellMask m) {
      const VoteCounts inside = g.sum(m);
      if (!window.contains(inside.population()) || !window.contains(total - inside.population())) {
        return;
      }
      std::vector<int> labels(p.size(), 2);
      for (std::size_t x = 0; x < rect.cells.size(); ++x) {
        if (m & bit(x)) labels[rect.cells[x]] = 1;
      }
      const VoteCounts parts[2] = {inside, p.total() - inside};
      const std::int64_t value = total_effgap(parts).total_scaled_abs;
      if (best_labels && (value > best_value || (value == best_value && labels >= *best_labels))) {
        return;
      }
      if (!plan_connected(p, labels)) return;
      best_value = value;
      best_labels = std::move(labels);
    });
  }
  if (best_labels) best = make_plan(p, std::move(*best_labels));
  return best;
}

TwoDistrictPlan solve_canonical(const GridPolygon& p, int t, const PopulationWindow& window) {
  require_small(t);
  const BasicDecomposition d = build_decomposition(p, t);
  const auto choices = all_choices(p, d);
  const ReachTable table = run_reach(p, d, choices, {});

  VoteCounts tree;
  for (std::size_t i : d.tree_cells()) tree += p.votes(i);
  const VoteCounts total = p.total();

  std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> candidates;
  for (const auto& [key, mark] : table.marks()) {
    const VoteCounts one = tree + VoteCounts{key.first, key.second};
    const VoteCounts parts[2] = {one, total - one};
    if (!window.contains(parts[0].population()) || !window.contains(parts[1].population())) {
      continue;
    }
    candidates.emplace_back(total_effgap(parts).total_scaled_abs, key.first, key.second);
  }
  std::sort(candidates.begin(), candidates.end());

  for (const auto& [value, a, b] : candidates) {
    std::vector<int> labels(p.size(), 2);
    for (std::size_t i : d.tree_cells()) labels[i] = 1;
    std::pair<std::int64_t, std::int64_t> cur{a, b};
    for (;;) {
      const ReachTable::Mark mark = table.marks().at(cur);
      if (mark.rectangle < 0) break;
      const auto r = static_cast<std::size_t>(mark.rectangle);
      const InteriorChoice& choice = choices[r][mark.subset];
      const BasicRectangle& rect = d.rectangles[r];
      for (std::size_t x = 0; x < rect.interior.size(); ++x) {
        if (choice.subset & (1u << x)) labels[rect.interior[x]] = 1;
      }
      for (std::size_t c : choice.connectors) labels[c] = 1;
      cur.first -= choice.added.party_a;
      cur.second -= choice.added.party_b;
    }
    std::vector<bool> one(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) one[i] = labels[i] == 1;
    if (!plan_connected(p, labels) || !is_simply_connected(p, one)) continue;
    return make_plan(p, std::move(labels));
  }
  throw std::runtime_error("no canonical plan in window");
}

Rational stability_margin(const PlanStats& stats) {
  std::optional<Rational> best;
  for (const DistrictStats& s : stats.per_district) {
    const std::int64_t pop = s.votes.population();
    const Rational r = pop == 0 ? Rational(0) : Rational(s.gap.value, 2 * pop);
    if (!best || r < *best) best = r;
  }
  return best.value_or(Rational(0));
}

bool is_gamma_stable(const PlanStats& stats, const Rational& gamma) {
  return gamma < stability_margin(stats);
}

Rational achieved_delta(const PlanStats& stats) {
  const std::int64_t total = stats.total.population();
  if (total == 0 || stats.per_district.empty()) return Rational(0);
  Rational worst(0);
  const Rational share(1, stats.kappa());
  for (const DistrictStats& s : stats.per_district) {
    Rational off = Rational(s.votes.population(), total) - share;
    if (off < 0) off = -off;
    worst = std::max(worst, off);
  }
  return worst;
}

NearStableResult solve_two_near_stable(const GridPolygon& p, const Rational& epsilon,
                                       std::optional<Rational> delta_bound) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  const Rational inv = 1 / epsilon;
  std::int64_t t = inv.numerator() / inv.denominator();
  if (inv.numerator() % inv.denominator() != 0) ++t;
  t = std::max<std::int64_t>(3, t);
  if (t * t > 25) {
    throw std::invalid_argument("epsilon too small: t = " + std::to_string(t) +
                                " exceeds the exhaustive limit t*t <= 25; use a larger epsilon");
  }

  NearStableResult res;
  res.t = static_cast<int>(t);
  res.epsilon = epsilon;
  res.max_cell_population = p.max_cell_population();
  res.delta_bound =
      delta_bound.value_or(std::min(Rational(1, 2), epsilon * res.max_cell_population));
  const PopulationWindow window = near_window(p.total().population(), res.delta_bound);

  std::optional<TwoDistrictPlan> case1 = solve_case1(p, res.t, window);
  std::optional<TwoDistrictPlan> canon;
  try {
    canon = solve_canonical(p, res.t, window);
  } catch (const std::runtime_error&) {
    if (!case1) throw;
  }
  if (case1 && (!canon || case1->stats.total_scaled_abs < canon->stats.total_scaled_abs)) {
    res.plan = std::move(*case1);
    res.source = "case1";
  } else {
    res.plan = std::move(*canon);
    res.source = "canonical";
  }
  res.delta_achieved = achieved_delta(res.plan.stats);
  res.stability = stability_margin(res.plan.stats);
  return res;
}

}  // namespace effgap
