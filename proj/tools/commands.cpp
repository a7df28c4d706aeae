#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "effgap/canonical.hpp"
#include "effgap/county_graph.hpp"
#include "effgap/hardness.hpp"
#include "effgap/local_search.hpp"
#include "effgap/oracle.hpp"
#include "effgap/synthetic.hpp"
#include "effgap/yconvex.hpp"

#ifndef EFFGAP_VERSION
#define EFFGAP_VERSION "0.0.0"
#endif

namespace effgap::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kDataDirVar = "EFFGAP_DATA_DIR";
constexpr int kMaxYConvexKappa = 4;

// Signals a clean "no solution" outcome.
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  json manifest;
};

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

// Relative paths that do not exist are looked up in $EFFGAP_DATA_DIR.
std::string resolve_data(const std::string& path) {
  if (fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv(kDataDirVar); dir && *dir) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

void record_input(Context& ctx, const std::string& path) {
  ctx.manifest["inputs"][path] = "sha256:" + sha256_file(path);
}

std::string percent(const Rational& r) { return format_percent(r) + "%"; }

std::string gap_text(const Rational& r, bool exact) {
  return exact ? to_string(r) : format_decimal(r, 1);
}

std::string share_text(const Rational& r, bool exact) { return exact ? to_string(r) : percent(r); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

// --- effgap -------------------------------------------------------------

struct EffgapArgs {
  std::string data;
  std::string plan;
  bool exact = false;
  std::string format = "table";
};

void print_report(Context& ctx, const CountyData& data, const PlanStats& stats, bool exact,
                  const std::string& format) {
  std::ostream& out = ctx.out;
  const Rational vote_share =
      stats.total.population() == 0 ? Rational(0) : Rational(stats.total.party_a, stats.total.population());
  if (format == "records") {
    for (int d = 0; d < stats.kappa(); ++d) {
      const DistrictStats& s = stats.per_district[static_cast<std::size_t>(d)];
      const ScaledWaste w = wasted_votes(s.votes);
      out << json{{"record", "district"},
                  {"district", data.district_numbers[static_cast<std::size_t>(d)]},
                  {"party_a", s.votes.party_a},
                  {"party_b", s.votes.party_b},
                  {"population", s.votes.population()},
                  {"winner", std::string(1, party_letter(s.winner))},
                  {"wasted_a", to_string(Rational(w.party_a, 2))},
                  {"wasted_b", to_string(Rational(w.party_b, 2))},
                  {"effgap", to_string(s.gap.unscaled())}}
                 .dump()
          << '\n';
    }
    out << json{{"record", "summary"},
                {"districts", stats.kappa()},
                {"effgap", to_string(stats.effgap())},
                {"normalized", to_string(stats.normalized)},
                {"normalized_percent", format_percent(stats.normalized)},
                {"seats_a", stats.seats_a},
                {"seats_b", stats.seats_b},
                {"vote_share_a", to_string(vote_share)},
                {"vote_share_a_percent", format_percent(vote_share)}}
               .dump()
        << '\n';
    return;
  }
  out << std::left << std::setw(10) << "district" << std::right << std::setw(12) << "party_a"
      << std::setw(12) << "party_b" << std::setw(12) << "population" << std::setw(8) << "winner"
      << std::setw(14) << "wasted_a" << std::setw(14) << "wasted_b" << std::setw(14) << "effgap"
      << '\n';
  for (int d = 0; d < stats.kappa(); ++d) {
    const DistrictStats& s = stats.per_district[static_cast<std::size_t>(d)];
    const ScaledWaste w = wasted_votes(s.votes);
    out << std::left << std::setw(10) << data.district_numbers[static_cast<std::size_t>(d)]
        << std::right << std::setw(12) << s.votes.party_a << std::setw(12) << s.votes.party_b
        << std::setw(12) << s.votes.population() << std::setw(8) << party_letter(s.winner)
        << std::setw(14) << gap_text(Rational(w.party_a, 2), exact) << std::setw(14)
        << gap_text(Rational(w.party_b, 2), exact) << std::setw(14)
        << gap_text(s.gap.unscaled(), exact) << '\n';
  }
  out << "efficiency gap      " << gap_text(stats.effgap(), exact) << '\n'
      << "normalized          " << share_text(stats.normalized, exact) << '\n'
      << "seats A-B           " << stats.seats_a << '-' << stats.seats_b << '\n'
      << "vote share A        " << share_text(vote_share, exact) << '\n';
}

int cmd_effgap(Context& ctx, const EffgapArgs& a) {
  const std::string path = resolve_data(a.data);
  record_input(ctx, path);
  CountyData data = load_county_csv(path);
  for (const std::string& w : data.warnings) ctx.err << "warning: " << w << '\n';
  DistrictPlan plan = data.plan;
  if (!a.plan.empty()) {
    const std::string plan_path = resolve_data(a.plan);
    record_input(ctx, plan_path);
    std::ifstream in(plan_path);
    if (!in) throw DataError("cannot open " + plan_path);
    plan = read_plan_csv(in, data);
  }
  const PlanStats stats = plan_stats(data.graph, plan);
  print_report(ctx, data, stats, a.exact, a.format);
  ctx.manifest["config"] = {{"exact", a.exact}, {"format", a.format}, {"kappa", plan.kappa()}};
  ctx.manifest["result"] = {{"effgap", to_string(stats.effgap())},
                            {"normalized", to_string(stats.normalized)},
                            {"seats_a", stats.seats_a},
                            {"seats_b", stats.seats_b}};
  return kOk;
}

// --- localsearch -----------------------------------------------------------

struct LocalSearchArgs {
  std::string data;
  SearchConfig cfg;
  std::string plan_out;
  std::string trace_out;
  bool exact = false;
};

int cmd_localsearch(Context& ctx, const LocalSearchArgs& a) {
  const std::string path = resolve_data(a.data);
  record_input(ctx, path);
  CountyData data = load_county_csv(path);
  for (const std::string& w : data.warnings) ctx.err << "warning: " << w << '\n';
  const PlanStats before = plan_stats(data.graph, data.plan);
  const SearchResult result = run_local_search(data.graph, data.plan, a.cfg);
  const ReplicaResult& best = result.best();
  const PlanStats after = plan_stats(data.graph, best.plan);

  const std::string state = fs::path(path).stem().string();
  ctx.out << std::left << std::setw(10) << "state" << std::setw(10) << "plan" << std::setw(12)
          << "seats A-B" << "normalized effgap" << '\n';
  auto row = [&](const char* label, const PlanStats& s) {
    ctx.out << std::left << std::setw(10) << state << std::setw(10) << label << std::setw(12)
            << (std::to_string(s.seats_a) + "-" + std::to_string(s.seats_b))
            << share_text(s.normalized, a.exact) << '\n';
  };
  row("Original", before);
  row("New", after);
  ctx.out << "best replica " << result.best_replica << " of " << a.cfg.replicas << ", "
          << best.moves.size() << " accepted moves\n";

  if (!a.plan_out.empty()) {
    std::ostringstream plan_text;
    write_plan_csv(plan_text, data, best.plan);
    write_text_file(a.plan_out, plan_text.str());
  }
  if (!a.trace_out.empty()) write_text_file(a.trace_out, format_trace(data.graph, result));

  ctx.manifest["config"] = {{"seed", a.cfg.seed},
                            {"mu", a.cfg.mu},
                            {"k", a.cfg.k},
                            {"replicas", a.cfg.replicas},
                            {"threads", a.cfg.threads},
                            {"best_improvement", a.cfg.best_improvement},
                            {"kappa", data.plan.kappa()},
                            {"rng", kRngAlgorithm}};
  json replicas = json::array();
  for (const ReplicaResult& r : result.replicas) {
    replicas.push_back({{"replica", r.replica},
                        {"seed", r.seed},
                        {"final_effgap", to_string(Rational(r.final_scaled, 2))},
                        {"moves", r.moves.size()},
                        {"wall_seconds", r.wall_seconds}});
  }
  ctx.manifest["result"] = {{"original_normalized", to_string(before.normalized)},
                            {"new_normalized", to_string(after.normalized)},
                            {"best_replica", result.best_replica},
                            {"replicas", replicas}};
  return kOk;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string grid;
  std::string solver = "brute";
  int kappa = 0;
  int t = 0;
  std::string epsilon;
  std::string delta;
  std::size_t oracle_limit = kDefaultOracleLimit;
  std::string plan_out;
  bool exact = false;
};

void print_solution(Context& ctx, const GridPolygon& p, const GridPartition& q, int kappa,
                    bool exact) {
  const PlanStats stats = partition_stats(p, q, kappa);
  ctx.out << "effgap              " << gap_text(stats.effgap(), exact) << '\n'
          << "normalized          " << share_text(stats.normalized, exact) << '\n'
          << "seats A-B           " << stats.seats_a << '-' << stats.seats_b << '\n'
          << render_partition(p, q);
}

int cmd_solve(Context& ctx, const SolveArgs& a) {
  const std::string path = resolve_data(a.grid);
  record_input(ctx, path);
  GridInstance inst = load_grid_instance(path);
  const GridPolygon& p = inst.polygon;
  if (const auto v = validate_polygon(p); !v) {
    std::string where;
    if (v.witness) where = " at (" + std::to_string(v.witness->row) + "," + std::to_string(v.witness->col) + ")";
    throw DataError("invalid polygon: " + v.violation + where);
  }
  const int kappa = a.kappa > 0 ? a.kappa : inst.kappa;
  ctx.manifest["config"] = {{"solver", a.solver}, {"kappa", kappa}};
  ctx.out << "solver              " << a.solver << '\n' << "kappa               " << kappa << '\n';

  GridPartition witness;
  if (a.solver == "brute") {
    const PopulationMode mode =
        a.delta.empty() ? PopulationMode::exact() : PopulationMode::near(parse_rational(a.delta));
    ctx.manifest["config"]["mode"] = mode.describe();
    ctx.manifest["config"]["oracle_limit"] = a.oracle_limit;
    const BruteForceResult r = brute_force_opt(p, kappa, mode, a.oracle_limit);
    ctx.manifest["result"]["partitions_visited"] = r.partitions_visited;
    if (!r.feasible) throw Infeasible("infeasible: no valid partition");
    ctx.out << "optimal partitions  " << r.optima.size() << '\n';
    witness = r.optima.front();
  } else if (a.solver == "yconvex") {
    if (kappa > kMaxYConvexKappa) {
      throw std::invalid_argument("yconvex solver supports kappa <= " + std::to_string(kMaxYConvexKappa));
    }
    const YConvexResult r = solve_yconvex(p, kappa);
    if (!r.feasible) throw Infeasible("infeasible: no y-convex equipartition");
    witness = r.witness;
  } else if (a.solver == "canonical") {
    if (kappa != 2) throw std::invalid_argument("canonical solver needs kappa = 2");
    Rational eps = a.epsilon.empty() ? (a.t > 0 ? Rational(1, a.t) : Rational(1, 3)) : parse_rational(a.epsilon);
    std::optional<Rational> bound;
    if (!a.delta.empty()) bound = parse_rational(a.delta);
    NearStableResult r;
    try {
      r = solve_two_near_stable(p, eps, bound);
    } catch (const std::runtime_error& e) {
      throw Infeasible(std::string("infeasible: ") + e.what());
    }
    ctx.out << "plan source         " << r.source << '\n'
            << "t                   " << r.t << '\n'
            << "delta bound         " << to_string(r.delta_bound) << '\n'
            << "delta achieved      " << to_string(r.delta_achieved) << '\n'
            << "stability margin    " << to_string(r.stability) << '\n';
    ctx.manifest["config"]["t"] = r.t;
    ctx.manifest["config"]["epsilon"] = to_string(eps);
    ctx.manifest["config"]["delta"] = to_string(r.delta_bound);
    ctx.manifest["result"]["delta_achieved"] = to_string(r.delta_achieved);
    ctx.manifest["result"]["source"] = r.source;
    witness = r.plan.partition;
  } else {
    throw std::invalid_argument("unknown solver '" + a.solver + "'");
  }
  print_solution(ctx, p, witness, kappa, a.exact);
  ctx.manifest["result"]["effgap"] = to_string(partition_stats(p, witness, kappa).effgap());
  if (!a.plan_out.empty()) {
    std::ostringstream text;
    write_partition(text, p, witness);
    write_text_file(a.plan_out, text.str());
  }
  return kOk;
}

// --- gen-hardness ----------------------------------------------------------

struct HardnessArgs {
  std::vector<std::int64_t> values;
  int decoys = 0;
  std::uint64_t seed = 0;
  bool auto_scale = false;
  std::string output;
};

int cmd_gen_hardness(Context& ctx, const HardnessArgs& a) {
  HardnessInstance h;
  try {
    h = a.auto_scale ? gen_hardness_instance_scaled(a.values, a.decoys, a.seed)
                     : gen_hardness_instance(a.values, a.decoys, a.seed);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(e.what()) + " (or pass --auto-scale)");
  }
  std::ostringstream text;
  write_grid_instance(text, h.instance());
  if (a.output.empty()) {
    ctx.out << text.str();
  } else {
    write_text_file(a.output, text.str());
  }
  const bool split = a.values.size() <= 30 && subset_sum_oracle(h.values);
  ctx.manifest["config"] = {{"values", a.values}, {"decoys", a.decoys}, {"seed", a.seed},
                            {"auto_scale", a.auto_scale}};
  ctx.manifest["result"] = {{"rows", h.polygon.rows()}, {"cols", h.polygon.cols()},
                            {"kappa", h.kappa},        {"delta", h.delta},
                            {"equal_split", split},    {"expected_opt", split ? 0 : h.delta}};
  return kOk;
}

// --- synth-state -----------------------------------------------------------

int cmd_synth_state(Context& ctx, const std::string& state, const std::string& output) {
  const StateProfile& profile = state_profile(state);
  const std::string text = synthesize_state_csv(profile);
  if (output.empty()) {
    ctx.out << text;
  } else {
    write_text_file(output, text);
  }
  ctx.manifest["config"] = {{"state", state}, {"seed", profile.seed}};
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx{out, err, json::object()};
  ctx.manifest["tool_version"] = EFFGAP_VERSION;
  ctx.manifest["inputs"] = json::object();

  CLI::App app{"Measure and minimize the efficiency gap of district plans", "effgap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EFFGAP_VERSION);
  std::string manifest_path;
  app.add_option("--manifest", manifest_path, "Write the run manifest to this file instead of stderr");

  EffgapArgs eg;
  auto* c_effgap = app.add_subcommand("effgap", "Report the efficiency gap of a plan");
  c_effgap->add_option("data", eg.data, "County CSV")->required();
  c_effgap->add_option("--plan", eg.plan, "Plan CSV (district,county_id,assigned_district)");
  c_effgap->add_flag("--exact", eg.exact, "Print exact rationals");
  c_effgap->add_option("--format", eg.format, "table or records")
      ->check(CLI::IsMember({"table", "records"}));

  LocalSearchArgs ls;
  auto* c_ls = app.add_subcommand("localsearch", "Lower the efficiency gap by local search");
  c_ls->add_option("data", ls.data, "County CSV")->required();
  c_ls->add_option("--seed", ls.cfg.seed, "Random seed");
  c_ls->add_option("--mu", ls.cfg.mu, "Iterations per replica")->check(CLI::PositiveNumber);
  c_ls->add_option("--k", ls.cfg.k, "Most nodes drawn per iteration")->check(CLI::NonNegativeNumber);
  c_ls->add_option("--replicas", ls.cfg.replicas, "Independent replicas")->check(CLI::PositiveNumber);
  c_ls->add_option("--threads", ls.cfg.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  c_ls->add_flag("--best-improvement", ls.cfg.best_improvement, "Take the best improving move per node");
  c_ls->add_option("--plan-out", ls.plan_out, "Write the best plan here");
  c_ls->add_option("--trace-out", ls.trace_out, "Write the move trace here");
  c_ls->add_flag("--exact", ls.exact, "Print exact rationals");

  SolveArgs sv;
  auto* c_solve = app.add_subcommand("solve", "Solve a grid instance");
  c_solve->add_option("--grid", sv.grid, "Grid instance file")->required();
  c_solve->add_option("--solver", sv.solver, "brute, yconvex or canonical")
      ->check(CLI::IsMember({"brute", "yconvex", "canonical"}));
  c_solve->add_option("--kappa", sv.kappa, "Number of districts (default: from the file)")
      ->check(CLI::PositiveNumber);
  c_solve->add_option("--t", sv.t, "Basic rectangle size for the canonical solver (sets epsilon = 1/t)")
      ->check(CLI::Range(3, 5));
  c_solve->add_option("--epsilon", sv.epsilon, "Approximation parameter, e.g. 1/3");
  c_solve->add_option("--delta-near", sv.delta, "Allowed population deviation, e.g. 1/10");
  c_solve->add_option("--oracle-limit", sv.oracle_limit, "Largest instance the brute-force solver accepts")
      ->check(CLI::Range(std::size_t{1}, kMaxMaskCells));
  c_solve->add_option("--plan-out", sv.plan_out, "Write the partition (row col label) here");
  c_solve->add_flag("--exact", sv.exact, "Print exact rationals");

  HardnessArgs hd;
  auto* c_hard = app.add_subcommand("gen-hardness", "Build a grid instance from a PARTITION input");
  c_hard->add_option("--values", hd.values, "Comma-separated positive integers")->required()->delimiter(',');
  c_hard->add_option("--decoys", hd.decoys, "Number of decoy cells")->check(CLI::NonNegativeNumber);
  c_hard->add_option("--seed", hd.seed, "Decoy layout seed");
  c_hard->add_flag("--auto-scale", hd.auto_scale, "Multiply every value by 4 first");
  c_hard->add_option("-o,--output", hd.output, "Output file (default: stdout)");

  std::string state;
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth-state", "Write a synthetic state county CSV");
  c_synth->add_option("--state", state, "WI, TX, VA or PA")->required();
  c_synth->add_option("-o,--output", synth_out, "Output file (default: stdout)");

  int code = kOk;
  std::string command = "none";
  bool emit = true;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e, out, err);
    code = status == 0 ? kOk : kUsage;
    emit = status != 0;
    command = "usage";
  }
  if (command != "usage") {
    const auto* sub = app.get_subcommands().front();
    command = sub->get_name();
    try {
      if (sub == c_effgap) code = cmd_effgap(ctx, eg);
      if (sub == c_ls) code = cmd_localsearch(ctx, ls);
      if (sub == c_solve) code = cmd_solve(ctx, sv);
      if (sub == c_hard) code = cmd_gen_hardness(ctx, hd);
      if (sub == c_synth) code = cmd_synth_state(ctx, state, synth_out);
    } catch (const Infeasible& e) {
      out << "infeasible\n";
      err << e.what() << '\n';
      ctx.manifest["result"]["status"] = "infeasible";
      code = kInfeasible;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      ctx.manifest["error"] = e.what();
      code = kInvalidInput;
    }
  }

  if (emit) {
    ctx.manifest["command"] = command;
    ctx.manifest["exit_code"] = code;
    ctx.manifest["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string line = ctx.manifest.dump();
    if (manifest_path.empty()) {
      err << line << '\n';
    } else {
      std::ofstream f(manifest_path, std::ios::app);
      f << line << '\n';
    }
  }
  return code;
}

}  // namespace effgap::cli
