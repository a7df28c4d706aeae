#pragma once

// Exact efficiency-gap arithmetic.
//
// A district's efficiency gap is wasted(A) - wasted(B), where the winner
// wastes every vote above half of the district and the loser wastes all of
// its votes. Ties go to Party A. Because of the halves the gap can be a
// half-integer, so every per-district value is carried scaled by two.

#include <cstdint>
#include <span>
#include <vector>

#include "effgap/rational.hpp"

namespace effgap {

struct VoteCounts {
  std::int64_t party_a = 0;
  std::int64_t party_b = 0;

  constexpr std::int64_t population() const { return party_a + party_b; }

  constexpr VoteCounts& operator+=(const VoteCounts& o) {
    party_a += o.party_a;
    party_b += o.party_b;
    return *this;
  }
  constexpr VoteCounts& operator-=(const VoteCounts& o) {
    party_a -= o.party_a;
    party_b -= o.party_b;
    return *this;
  }
  friend constexpr VoteCounts operator+(VoteCounts a, const VoteCounts& b) { return a += b; }
  friend constexpr VoteCounts operator-(VoteCounts a, const VoteCounts& b) { return a -= b; }
  friend constexpr bool operator==(const VoteCounts&, const VoteCounts&) = default;
};

enum class Party { A, B };

char party_letter(Party p);

// Twice the efficiency gap of one district. Always an integer.
struct ScaledEffgap {
  std::int64_t value = 0;

  Rational unscaled() const { return Rational(value, 2); }
  friend constexpr bool operator==(const ScaledEffgap&, const ScaledEffgap&) = default;
};

Party winner(const VoteCounts& v);

// 4*A - 3*Pop when A wins (ties included), 4*A - Pop otherwise.
ScaledEffgap district_effgap(const VoteCounts& v);

// Wasted votes of each party, scaled by two.
struct ScaledWaste {
  std::int64_t party_a = 0;
  std::int64_t party_b = 0;
};
ScaledWaste wasted_votes(const VoteCounts& v);

struct DistrictStats {
  VoteCounts votes;
  ScaledEffgap gap;
  Party winner = Party::A;
};

struct PlanStats {
  std::vector<DistrictStats> per_district;
  VoteCounts total;
  std::int64_t signed_scaled_sum = 0;  // sum of per-district scaled gaps
  std::int64_t total_scaled_abs = 0;   // 2 * Effgap_kappa
  Rational normalized;                 // Effgap_kappa / Pop(P); 0 when Pop(P) = 0
  int seats_a = 0;
  int seats_b = 0;

  int kappa() const { return static_cast<int>(per_district.size()); }
  Rational effgap() const { return Rational(total_scaled_abs, 2); }
  bool equal_populations() const;
};

// Throws std::invalid_argument("no districts") on an empty sequence.
PlanStats total_effgap(std::span<const VoteCounts> districts);

// One member of the value set |2A - (z + kappa/2) Pop / kappa|, z = 0..kappa.
// Coincident values are merged and keep every z that produced them.
struct AttainableValue {
  Rational value;
  std::vector<int> z_indices;
};

// Ascending, deduplicated. Throws std::invalid_argument when kappa < 1 or
// the totals are inconsistent.
std::vector<AttainableValue> attainable_values(std::int64_t total_a, std::int64_t total_pop,
                                               int kappa);

// Unscaled value for one z.
Rational attainable_value(std::int64_t total_a, std::int64_t total_pop, int kappa, int z);

struct Margins {
  Rational vote_margin;  // A/Pop - 1/2
  Rational seat_margin;  // seats_a/kappa - 1/2
  Rational normalized;   // |2 * vote_margin - seat_margin|
};

// The margin form of the normalized gap. Only an identity on exact
// equipartitions; throws std::invalid_argument("identity requires exact
// equipartition") otherwise.
Margins margin_identity(const PlanStats& stats, const VoteCounts& total);

// Vote and seat margins without the equal-population precondition.
Margins margins(const PlanStats& stats);

}  // namespace effgap
