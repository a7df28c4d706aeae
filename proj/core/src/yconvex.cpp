#include "effgap/yconvex.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace effgap {

namespace {

// Rows of the column's single run, or nullopt for an empty column.
std::optional<Interval> column_run(const GridPolygon& p, int column) {
  std::optional<Interval> run;
  bool closed = false;
  for (int row = 0; row < p.rows(); ++row) {
    if (p.contains({row, column})) {
      if (closed) {
        throw std::invalid_argument("column " + std::to_string(column) +
                                    " not y-convex-compatible");
      }
      if (!run) {
        run = Interval{row, row};
      } else {
        run->hi = row;
      }
    } else if (run) {
      closed = true;
    }
  }
  return run;
}

VoteCounts segment_votes(const GridPolygon& p, int column, const Interval& seg) {
  VoteCounts v;
  for (int row = seg.lo; row <= seg.hi; ++row) {
    if (auto idx = p.index_of({row, column})) v += p.votes(*idx);
  }
  return v;
}

void assign_labels(const Interval& run, int kappa, std::vector<Interval>& pieces,
                   std::size_t pos, std::vector<std::optional<Interval>>& labeled, int column,
                   std::vector<ColumnSegmentation>& out) {
  if (pos == pieces.size()) {
    out.push_back({column, labeled});
    return;
  }
  for (int label = 0; label < kappa; ++label) {
    auto& slot = labeled[static_cast<std::size_t>(label)];
    if (slot) continue;
    slot = pieces[pos];
    assign_labels(run, kappa, pieces, pos + 1, labeled, column, out);
    slot.reset();
  }
}

void cut_run(const Interval& run, int kappa, int start, std::vector<Interval>& pieces, int column,
             std::vector<ColumnSegmentation>& out) {
  if (static_cast<int>(pieces.size()) == kappa) return;
  for (int end = start; end <= run.hi; ++end) {
    pieces.push_back({start, end});
    if (end == run.hi) {
      std::vector<std::optional<Interval>> labeled(static_cast<std::size_t>(kappa));
      assign_labels(run, kappa, pieces, 0, labeled, column, out);
    } else {
      cut_run(run, kappa, end + 1, pieces, column, out);
    }
    pieces.pop_back();
  }
}

}  // namespace

std::vector<ColumnSegmentation> enumerate_segmentations(const GridPolygon& p, int column,
                                                        int kappa) {
  if (kappa < 1) throw std::invalid_argument("kappa must be at least 1");
  const auto run = column_run(p, column);
  std::vector<ColumnSegmentation> out;
  if (!run) {
    out.push_back({column, std::vector<std::optional<Interval>>(static_cast<std::size_t>(kappa))});
    return out;
  }
  std::vector<Interval> pieces;
  cut_run(*run, kappa, run->lo, pieces, column, out);
  return out;
}

DPState DPState::initial(int kappa) {
  const auto k = static_cast<std::size_t>(kappa);
  return {std::vector<VoteCounts>(k), std::vector<LabelStatus>(k, LabelStatus::kUnstarted),
          std::vector<std::optional<Interval>>(k)};
}

int DPState::started() const {
  return static_cast<int>(std::count_if(status.begin(), status.end(),
                                        [](LabelStatus s) { return s != LabelStatus::kUnstarted; }));
}

Transition transition_feasible(const GridPolygon& p, const DPState& prev,
                               const ColumnSegmentation& seg, std::int64_t population_cap) {
  Transition t;
  t.next = prev;
  for (std::size_t j = 0; j < prev.status.size(); ++j) {
    const std::string name = "label " + std::to_string(j + 1);
    const auto& piece = seg.segments[j];
    switch (prev.status[j]) {
      case LabelStatus::kUnstarted:
        if (piece) t.next.status[j] = LabelStatus::kActive;
        break;
      case LabelStatus::kActive:
        if (!piece) {
          t.next.status[j] = LabelStatus::kFinished;
        } else {
          const Interval& before = *prev.current[j];
          if (piece->hi < before.lo || before.hi < piece->lo) {
            t.reason = name + ": no overlap, district disconnected";
            return t;
          }
        }
        break;
      case LabelStatus::kFinished:
        if (piece) {
          t.reason = name + " reactivated";
          return t;
        }
        break;
    }
    t.next.current[j] = piece;
    if (piece) {
      t.next.votes[j] += segment_votes(p, seg.column, *piece);
      if (population_cap >= 0 && t.next.votes[j].population() > population_cap) {
        t.reason = name + " exceeds population cap";
        return t;
      }
    }
  }
  t.ok = true;
  return t;
}

namespace {

using StateKey = std::vector<std::int64_t>;

StateKey key_of(const DPState& s) {
  StateKey key;
  key.reserve(s.status.size() * 5);
  for (std::size_t j = 0; j < s.status.size(); ++j) {
    key.push_back(s.votes[j].party_a);
    key.push_back(s.votes[j].party_b);
    key.push_back(static_cast<std::int64_t>(s.status[j]));
    key.push_back(s.current[j] ? s.current[j]->lo : -1);
    key.push_back(s.current[j] ? s.current[j]->hi : -1);
  }
  return key;
}

// Labels are interchangeable; keep only segmentations that start new labels
// in first-appearance order (next unused label, top to bottom).
bool starts_labels_in_order(const DPState& prev, const ColumnSegmentation& seg) {
  int next_label = prev.started();
  std::vector<std::pair<int, int>> fresh;  // (top row, label)
  for (std::size_t j = 0; j < prev.status.size(); ++j) {
    if (prev.status[j] == LabelStatus::kUnstarted && seg.segments[j]) {
      fresh.emplace_back(seg.segments[j]->lo, static_cast<int>(j));
    }
  }
  std::sort(fresh.begin(), fresh.end());
  for (const auto& [row, label] : fresh) {
    if (label != next_label) return false;
    ++next_label;
  }
  return true;
}

struct Node {
  DPState state;
  std::size_t parent = 0;
  std::size_t segmentation = 0;
};

}  // namespace

YConvexResult solve_yconvex(const GridPolygon& p, int kappa) {
  if (kappa < 1) throw std::invalid_argument("kappa must be at least 1");
  std::vector<std::vector<ColumnSegmentation>> segs;
  for (int c = 0; c < p.cols(); ++c) segs.push_back(enumerate_segmentations(p, c, kappa));

  YConvexResult result;
  const std::int64_t total = p.total().population();
  if (p.empty() || total % kappa != 0 || static_cast<std::size_t>(kappa) > p.size()) return result;
  const std::int64_t target = total / kappa;

  std::vector<std::vector<Node>> layers;
  std::vector<Node> frontier{{DPState::initial(kappa), 0, 0}};
  for (int c = 0; c < p.cols(); ++c) {
    std::vector<Node> next;
    std::map<StateKey, std::size_t> seen;
    const auto& column_segs = segs[static_cast<std::size_t>(c)];
    for (std::size_t parent = 0; parent < frontier.size(); ++parent) {
      const DPState& prev = frontier[parent].state;
      for (std::size_t s = 0; s < column_segs.size(); ++s) {
        if (!starts_labels_in_order(prev, column_segs[s])) continue;
        Transition t = transition_feasible(p, prev, column_segs[s], target);
        if (!t.ok) continue;
        auto [it, inserted] = seen.emplace(key_of(t.next), next.size());
        if (inserted) next.push_back({std::move(t.next), parent, s});
      }
    }
    result.states_per_column.push_back(next.size());
    layers.push_back(std::move(frontier));
    frontier = std::move(next);
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const DPState& s = frontier[i].state;
    const bool complete = std::all_of(s.votes.begin(), s.votes.end(), [&](const VoteCounts& v) {
      return v.population() == target;
    }) && s.started() == kappa;
    if (!complete) continue;
    const std::int64_t value = total_effgap(s.votes).total_scaled_abs;
    if (!best || value < result.best_scaled_abs) {
      best = i;
      result.best_scaled_abs = value;
    }
  }
  if (!best) return result;

  result.feasible = true;
  result.witness.labels.assign(p.size(), 0);
  std::size_t idx = *best;
  for (int c = p.cols() - 1; c >= 0; --c) {
    const Node& node = c == p.cols() - 1 ? frontier[idx] : layers[static_cast<std::size_t>(c + 1)][idx];
    const ColumnSegmentation& seg = segs[static_cast<std::size_t>(c)][node.segmentation];
    for (std::size_t j = 0; j < seg.segments.size(); ++j) {
      if (!seg.segments[j]) continue;
      for (int row = seg.segments[j]->lo; row <= seg.segments[j]->hi; ++row) {
        result.witness.labels[*p.index_of({row, c})] = static_cast<int>(j) + 1;
      }
    }
    idx = node.parent;
  }
  return result;
}

}  // namespace effgap
