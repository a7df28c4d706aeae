#include "effgap/effgap.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace effgap {

char party_letter(Party p) { return p == Party::A ? 'A' : 'B'; }

Party winner(const VoteCounts& v) {
  return 2 * v.party_a >= v.population() ? Party::A : Party::B;
}

ScaledEffgap district_effgap(const VoteCounts& v) {
  const std::int64_t pop = v.population();
  if (winner(v) == Party::A) return {4 * v.party_a - 3 * pop};
  return {4 * v.party_a - pop};
}

ScaledWaste wasted_votes(const VoteCounts& v) {
  const std::int64_t pop = v.population();
  if (winner(v) == Party::A) return {2 * v.party_a - pop, 2 * v.party_b};
  return {2 * v.party_a, 2 * v.party_b - pop};
}

bool PlanStats::equal_populations() const {
  if (per_district.empty()) return true;
  const std::int64_t first = per_district.front().votes.population();
  return std::all_of(per_district.begin(), per_district.end(),
                     [&](const DistrictStats& d) { return d.votes.population() == first; });
}

PlanStats total_effgap(std::span<const VoteCounts> districts) {
  if (districts.empty()) throw std::invalid_argument("no districts");
  PlanStats stats;
  stats.per_district.reserve(districts.size());
  for (const VoteCounts& v : districts) {
    if (v.party_a < 0 || v.party_b < 0) throw std::invalid_argument("negative vote count");
    DistrictStats d{v, district_effgap(v), winner(v)};
    stats.total += v;
    stats.signed_scaled_sum += d.gap.value;
    if (d.winner == Party::A) {
      ++stats.seats_a;
    } else {
      ++stats.seats_b;
    }
    stats.per_district.push_back(d);
  }
  stats.total_scaled_abs = std::llabs(stats.signed_scaled_sum);
  const std::int64_t pop = stats.total.population();
  stats.normalized = pop == 0 ? Rational(0) : Rational(stats.total_scaled_abs, 2 * pop);
  return stats;
}

Rational attainable_value(std::int64_t total_a, std::int64_t total_pop, int kappa, int z) {
  if (kappa < 1) throw std::invalid_argument("kappa must be at least 1");
  if (z < 0 || z > kappa) throw std::invalid_argument("z out of range");
  // |2A - (z + kappa/2) Pop / kappa| = |4*kappa*A - (2z + kappa) Pop| / (2*kappa)
  const std::int64_t num = 4 * static_cast<std::int64_t>(kappa) * total_a -
                           (2 * static_cast<std::int64_t>(z) + kappa) * total_pop;
  return Rational(std::llabs(num), 2 * static_cast<std::int64_t>(kappa));
}

std::vector<AttainableValue> attainable_values(std::int64_t total_a, std::int64_t total_pop,
                                               int kappa) {
  if (kappa < 1) throw std::invalid_argument("kappa must be at least 1");
  if (total_a < 0 || total_pop < total_a) {
    throw std::invalid_argument("require 0 <= total_a <= total_pop");
  }
  std::vector<AttainableValue> values;
  for (int z = 0; z <= kappa; ++z) {
    const Rational v = attainable_value(total_a, total_pop, kappa, z);
    auto it = std::find_if(values.begin(), values.end(),
                           [&](const AttainableValue& a) { return a.value == v; });
    if (it == values.end()) {
      values.push_back({v, {z}});
    } else {
      it->z_indices.push_back(z);
    }
  }
  std::sort(values.begin(), values.end(),
            [](const AttainableValue& a, const AttainableValue& b) { return a.value < b.value; });
  return values;
}

Margins margins(const PlanStats& stats) {
  const std::int64_t pop = stats.total.population();
  if (pop == 0) throw std::invalid_argument("margins undefined for zero population");
  if (stats.per_district.empty()) throw std::invalid_argument("no districts");
  Margins m;
  m.vote_margin = Rational(stats.total.party_a, pop) - Rational(1, 2);
  m.seat_margin = Rational(stats.seats_a, stats.kappa()) - Rational(1, 2);
  m.normalized = abs(2 * m.vote_margin - m.seat_margin);
  return m;
}

Margins margin_identity(const PlanStats& stats, const VoteCounts& total) {
  if (!(stats.total == total)) {
    throw std::invalid_argument("district totals do not match the state total");
  }
  if (!stats.equal_populations()) {
    throw std::invalid_argument("identity requires exact equipartition");
  }
  return margins(stats);
}

}  // namespace effgap
