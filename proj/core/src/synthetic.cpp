#include "effgap/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "effgap/rng.hpp"

namespace effgap {

namespace {

// Splits `total` in proportion to `weights` (largest remainder, ties to the
// lower index).
std::vector<std::int64_t> allocate(std::int64_t total, const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::int64_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rest;
  std::int64_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::int64_t>(std::floor(exact));
    used += out[i];
    rest.emplace_back(-(exact - static_cast<double>(out[i])), i);
  }
  std::sort(rest.begin(), rest.end());
  for (std::size_t j = 0; used < total; ++j, ++used) ++out[rest[j % rest.size()].second];
  return out;
}

// As allocate, but no entry may exceed its cap; the excess is spread over
// the others. Requires total <= sum of caps.
std::vector<std::int64_t> allocate_capped(std::int64_t total, const std::vector<double>& weights,
                                          const std::vector<std::int64_t>& caps) {
  std::vector<std::int64_t> out(weights.size(), 0);
  std::vector<bool> capped(weights.size(), false);
  for (;;) {
    std::int64_t fixed = 0;
    std::vector<double> w(weights.size(), 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (capped[i]) {
        fixed += caps[i];
      } else {
        w[i] = weights[i];
      }
    }
    out = allocate(total - fixed, w);
    bool again = false;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (capped[i]) {
        out[i] = caps[i];
      } else if (out[i] > caps[i]) {
        capped[i] = true;
        again = true;
      }
    }
    if (!again) return out;
  }
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

std::int64_t round_rational(const Rational& r) {
  const Rational shifted = r + Rational(1, 2);
  std::int64_t q = shifted.numerator() / shifted.denominator();
  if (shifted.numerator() % shifted.denominator() != 0 && shifted.numerator() < 0) --q;
  return q;
}

}  // namespace

const std::vector<StateProfile>& state_profiles() {
  static const std::vector<StateProfile> profiles = {
      {"WI", 9, 9, 8, Rational(5075, 10000), 3, Rational(1476, 10000), 2'900'000, 55},
      {"TX", 15, 16, 36, Rational(4365, 10000), 12, Rational(409, 10000), 7'900'000, 48},
      {"VA", 10, 11, 11, Rational(5196, 10000), 4, Rational(2225, 10000), 3'800'000, 51},
      {"PA", 12, 13, 18, Rational(5065, 10000), 5, Rational(2380, 10000), 5'600'000, 42},
  };
  return profiles;
}

const StateProfile& state_profile(const std::string& name) {
  for (const StateProfile& p : state_profiles()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown state profile '" + name + "' (known: WI, TX, VA, PA)");
}

std::string synthesize_state_csv(const StateProfile& s) {
  const int n_nodes = s.rows * s.cols;
  if (s.kappa < 2 || s.kappa > n_nodes) throw std::invalid_argument("kappa out of range");
  if (s.seats_a < 1 || s.seats_a >= s.kappa) throw std::invalid_argument("seats_a out of range");
  Rng rng(s.seed);

  // Effgap = |2A - T/2 - S_A| with S_A the population of A-won districts;
  // A is short of its fair seat share, so S_A = 2A - T/2 - gap * T.
  const std::int64_t T = s.total_pop;
  const std::int64_t A = round_rational(s.a_share * T);
  const std::int64_t S_A = round_rational(Rational(2 * A) - Rational(T, 2) - s.target_gap * T);
  if (S_A <= 0 || S_A >= T) throw std::invalid_argument("targets give no valid won-seat population");

  // Shares: cracked losses c, packed wins p, with p * S_A + c * (T - S_A) = A.
  const double won = static_cast<double>(S_A);
  const double lost = static_cast<double>(T - S_A);
  const double c = std::min(0.44, (static_cast<double>(A) - 0.64 * won) / lost);
  const double p = (static_cast<double>(A) - c * lost) / won;
  if (c < 0.1 || p < 0.55 || p > 0.9) {
    throw std::invalid_argument("vote share and gap targets need implausible district shares");
  }

  const std::vector<std::size_t> picks =
      rng.sample(static_cast<std::size_t>(s.kappa), static_cast<std::size_t>(s.seats_a));
  std::vector<bool> a_wins(static_cast<std::size_t>(s.kappa), false);
  for (std::size_t d : picks) a_wins[d] = true;

  // District populations: turnout varies, each group sums to its target.
  std::vector<double> won_w, lost_w;
  for (int d = 0; d < s.kappa; ++d) {
    (a_wins[static_cast<std::size_t>(d)] ? won_w : lost_w).push_back(1.0 - s.turnout_spread / 2 + s.turnout_spread * rng.unit());
  }
  const auto won_pop = allocate(S_A, won_w);
  const auto lost_pop = allocate(T - S_A, lost_w);
  std::vector<std::int64_t> pop(static_cast<std::size_t>(s.kappa));
  std::vector<double> share(static_cast<std::size_t>(s.kappa));
  for (int d = 0, wi = 0, li = 0; d < s.kappa; ++d) {
    const auto k = static_cast<std::size_t>(d);
    if (a_wins[k]) {
      pop[k] = won_pop[static_cast<std::size_t>(wi++)];
      share[k] = std::max(0.52, p + s.share_spread * (rng.unit() - 0.5));
    } else {
      pop[k] = lost_pop[static_cast<std::size_t>(li++)];
      share[k] = std::min(0.485, c + s.share_spread * (rng.unit() - 0.5));
    }
  }
  std::vector<double> a_weight(share.size());
  for (std::size_t k = 0; k < share.size(); ++k) a_weight[k] = share[k] * static_cast<double>(pop[k]);
  const auto a_votes = allocate(A, a_weight);
  for (std::size_t k = 0; k < share.size(); ++k) {
    const bool wins = 2 * a_votes[k] >= pop[k];
    if (wins != a_wins[k] || a_votes[k] > pop[k]) {
      throw std::invalid_argument("district shares do not produce the requested seats");
    }
  }

  // Districts are runs of the snake order; counties vary in size and lean.
  const std::size_t n = static_cast<std::size_t>(n_nodes);
  std::vector<int> district(n);
  std::vector<std::size_t> snake;
  for (int r = 0; r < s.rows; ++r) {
    for (int i = 0; i < s.cols; ++i) {
      const int col = r % 2 == 0 ? i : s.cols - 1 - i;
      snake.push_back(static_cast<std::size_t>(r * s.cols + col));
    }
  }
  const std::size_t base = n / static_cast<std::size_t>(s.kappa);
  const std::size_t extra = n % static_cast<std::size_t>(s.kappa);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(s.kappa));
  for (std::size_t d = 0, pos = 0; d < members.size(); ++d) {
    const std::size_t size = base + (d < extra ? 1 : 0);
    for (std::size_t j = 0; j < size; ++j, ++pos) {
      district[snake[pos]] = static_cast<int>(d) + 1;
      members[d].push_back(snake[pos]);
    }
  }
  std::vector<std::int64_t> node_pop(n), node_a(n);
  for (std::size_t d = 0; d < members.size(); ++d) {
    std::vector<double> size_w, lean;
    for (std::size_t j = 0; j < members[d].size(); ++j) {
      size_w.push_back(0.3 + 1.4 * rng.unit());
      lean.push_back(s.lean_spread * (rng.unit() - 0.5));
    }
    const auto pops = allocate(pop[d], size_w);
    const double center = logit(share[d]);
    std::vector<double> lean_w(lean.size());
    for (std::size_t j = 0; j < lean.size(); ++j) {
      lean_w[j] = logistic(center + lean[j]) * static_cast<double>(pops[j]);
    }
    const auto as = allocate_capped(a_votes[d], lean_w, pops);
    for (std::size_t j = 0; j < members[d].size(); ++j) {
      node_pop[members[d][j]] = pops[j];
      node_a[members[d][j]] = as[j];
    }
  }

  auto county_id = [](std::size_t i) {
    std::string id = std::to_string(2 * i + 1);
    return std::string(3 - std::min<std::size_t>(3, id.size()), '0') + id;
  };
  auto key = [&](std::size_t i) { return std::to_string(district[i]) + ":" + county_id(i); };
  std::ostringstream out;
  out << "District,County_id,County,Republicans,Democrats,Neighbors\n";
  for (std::size_t i = 0; i < n; ++i) {
    const int r = static_cast<int>(i) / s.cols;
    const int col = static_cast<int>(i) % s.cols;
    std::string nb;
    const int dr[4] = {-1, 0, 0, 1};
    const int dc[4] = {0, -1, 1, 0};
    for (int d = 0; d < 4; ++d) {
      const int rr = r + dr[d];
      const int cc = col + dc[d];
      if (rr < 0 || rr >= s.rows || cc < 0 || cc >= s.cols) continue;
      nb += (nb.empty() ? "" : ",") + key(static_cast<std::size_t>(rr * s.cols + cc));
    }
    out << district[i] << ',' << county_id(i) << ',' << s.name << " County " << (i + 1) << ','
        << node_pop[i] - node_a[i] << ',' << node_a[i] << ",\"" << nb << "\"\n";
  }
  return out.str();
}

}  // namespace effgap
