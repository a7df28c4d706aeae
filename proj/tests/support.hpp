#pragma once

// Shared fixtures and reference implementations for the tests. The
// references here are written independently of the library (plain loops,
// no shared helpers) so that agreement means something.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "effgap/effgap.hpp"
#include "effgap/grid.hpp"
#include "effgap/rational.hpp"

namespace effgap::testing {

// Efficiency gap straight from the wasted-vote definition.
inline Rational wasted_vote_gap(std::int64_t a, std::int64_t b) {
  const Rational half(a + b, 2);
  Rational wasted_a, wasted_b;
  if (a >= b) {  // A wins ties
    wasted_a = Rational(a) - half;
    wasted_b = Rational(b);
  } else {
    wasted_a = Rational(a);
    wasted_b = Rational(b) - half;
  }
  return wasted_a - wasted_b;
}

inline Rational abs_rational(const Rational& r) { return r < 0 ? -r : r; }

inline GridPolygon uniform_rectangle(int rows, int cols, std::int64_t a, std::int64_t b) {
  std::vector<VoteCounts> v(static_cast<std::size_t>(rows * cols), VoteCounts{a, b});
  return GridPolygon::rectangle(rows, cols, v);
}

// Random hole-free polygon of `cells` cells grown inside a box, with cell
// populations drawn from [0, max_pop]. Retries until the shape has no holes.
inline GridPolygon random_polygon(std::mt19937_64& rng, int cells, int box, std::int64_t max_pop,
                                  bool single_run_columns = false) {
  for (;;) {
    std::set<std::pair<int, int>> shape{{box / 2, box / 2}};
    while (static_cast<int>(shape.size()) < cells) {
      auto it = shape.begin();
      std::advance(it, static_cast<long>(rng() % shape.size()));
      const int dir = static_cast<int>(rng() % 4);
      const int r = it->first + (dir == 0 ? -1 : dir == 3 ? 1 : 0);
      const int c = it->second + (dir == 1 ? -1 : dir == 2 ? 1 : 0);
      if (r < 0 || r >= box || c < 0 || c >= box) continue;
      shape.emplace(r, c);
    }
    std::vector<GridCell> out;
    for (const auto& [r, c] : shape) {
      const std::int64_t pop = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_pop + 1));
      const std::int64_t a = pop == 0 ? 0 : static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(pop + 1));
      out.push_back({{r, c}, {a, pop - a}});
    }
    GridPolygon p(box, box, out);
    if (!validate_polygon(p)) continue;
    if (single_run_columns) {
      bool ok = true;
      for (int c = 0; c < box && ok; ++c) {
        int runs = 0;
        bool inside = false;
        for (int r = 0; r < box; ++r) {
          const bool here = p.contains({r, c});
          if (here && !inside) ++runs;
          inside = here;
        }
        ok = runs <= 1;
      }
      if (!ok) continue;
    }
    return p;
  }
}

// Every labeling of the cells with 1..kappa (kappa^n of them) that forms a
// valid partition: each class non-empty, 4-connected, and within the
// population mode. Labelings that differ only by renaming classes are all
// reported. Only for tiny instances.
inline void naive_partitions(const GridPolygon& p, int kappa, const PopulationMode& mode,
                             const std::function<void(const std::vector<int>&)>& visit) {
  const std::size_t n = p.size();
  const auto window = mode.window(p.total().population(), kappa);
  if (!window) return;
  std::vector<int> labels(n, 1);
  auto class_ok = [&](int label) {
    std::vector<std::size_t> members;
    std::int64_t pop = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == label) {
        members.push_back(i);
        pop += p.votes(i).population();
      }
    }
    if (members.empty() || !window->contains(pop)) return false;
    std::vector<std::size_t> stack{members.front()};
    std::set<std::size_t> seen{members.front()};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      const Cell c = p.cell(v);
      const Cell around[4] = {{c.row - 1, c.col}, {c.row + 1, c.col}, {c.row, c.col - 1}, {c.row, c.col + 1}};
      for (const Cell& x : around) {
        for (std::size_t u = 0; u < n; ++u) {
          if (p.cell(u) == x && labels[u] == label && seen.insert(u).second) stack.push_back(u);
        }
      }
    }
    return seen.size() == members.size();
  };
  for (;;) {
    bool ok = true;
    for (int label = 1; label <= kappa && ok; ++label) ok = class_ok(label);
    if (ok) visit(labels);
    std::size_t i = 0;
    while (i < n && labels[i] == kappa) labels[i++] = 1;
    if (i == n) return;
    ++labels[i];
  }
}

// Total efficiency gap of a labeling via the wasted-vote reference.
inline Rational naive_total_gap(const GridPolygon& p, const std::vector<int>& labels, int kappa) {
  std::vector<std::int64_t> a(static_cast<std::size_t>(kappa)), b(static_cast<std::size_t>(kappa));
  for (std::size_t i = 0; i < p.size(); ++i) {
    a[static_cast<std::size_t>(labels[i] - 1)] += p.votes(i).party_a;
    b[static_cast<std::size_t>(labels[i] - 1)] += p.votes(i).party_b;
  }
  Rational sum(0);
  for (std::size_t j = 0; j < a.size(); ++j) sum += wasted_vote_gap(a[j], b[j]);
  return abs_rational(sum);
}

// Each label meets each column in one contiguous run of rows.
inline bool naive_y_convex(const GridPolygon& p, const std::vector<int>& labels, int kappa) {
  for (int label = 1; label <= kappa; ++label) {
    for (int c = 0; c < p.cols(); ++c) {
      int first = -1, last = -1, count = 0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.cell(i).col == c && labels[i] == label) {
          if (first < 0) first = p.cell(i).row;
          last = p.cell(i).row;
          ++count;
        }
      }
      if (count > 0 && last - first + 1 != count) return false;
    }
  }
  return true;
}

// Small county CSV: two districts of two counties each, a 2x2 block.
inline std::string toy_county_csv() {
  return "District,County_id,County,Republicans,Democrats,Neighbors\n"
         "1,001,Adams,40,60,\"1:003,2:005\"\n"
         "1,003,Brown,30,50,\"1:001,2:007\"\n"
         "2,005,Clark,80,20,\"1:001,2:007\"\n"
         "2,007,Dane,50,30,\"1:003,2:005\"\n";
}

}  // namespace effgap::testing
