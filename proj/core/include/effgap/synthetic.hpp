#pragma once

// Synthetic state-scale county graphs with prescribed statewide totals.
//
// Counties sit on a rows x cols grid with 4-neighbor adjacency; districts are
// consecutive runs of a row-by-row snake through the grid, so every district
// is connected. District populations and party shares are chosen so that the
// plan has exactly the requested Party A vote share, Party A seat count and
// normalized efficiency gap (up to one vote of rounding). Party A's seats are
// packed and its losses cracked, the way a partisan plan would draw them.

#include <cstdint>
#include <string>
#include <vector>

#include "effgap/rational.hpp"

namespace effgap {

struct StateProfile {
  std::string name;
  int rows = 0;
  int cols = 0;
  int kappa = 0;
  Rational a_share;     // Party A votes / two-party votes
  int seats_a = 0;
  Rational target_gap;  // normalized efficiency gap
  std::int64_t total_pop = 0;
  std::uint64_t seed = 0;
  double turnout_spread = 0.4;  // district populations vary over mean * [1 - s/2, 1 + s/2]
  double share_spread = 0.1;    // district A shares vary by +-share_spread/2
  double lean_spread = 2.0;     // county A shares vary by +-lean_spread/2 in log-odds
};

// WI, TX, VA and PA profiles.
const std::vector<StateProfile>& state_profiles();
// Throws std::invalid_argument for an unknown name.
const StateProfile& state_profile(const std::string& name);

// County CSV (District, County_id, County, Republicans, Democrats,
// Neighbors). Deterministic in the profile. Throws std::invalid_argument
// when the targets cannot be met on the requested grid.
std::string synthesize_state_csv(const StateProfile& profile);

}  // namespace effgap
