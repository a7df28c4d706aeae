#include "effgap/county_graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <boost/algorithm/string/trim.hpp>
#include <boost/tokenizer.hpp>

namespace effgap {

std::string to_string(const NodeKey& key) {
  return std::to_string(key.district) + ":" + key.county_id;
}

NodeKey parse_node_key(const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  const auto colon = t.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == t.size()) {
    throw std::invalid_argument("malformed neighbor key '" + t + "' (expected district:county_id)");
  }
  std::size_t used = 0;
  int district = 0;
  try {
    district = std::stoi(t.substr(0, colon), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != colon) {
    throw std::invalid_argument("malformed neighbor key '" + t + "' (district is not a number)");
  }
  return {district, boost::algorithm::trim_copy(t.substr(colon + 1))};
}

CountyGraph::CountyGraph(std::vector<CountyNode> nodes,
                         const std::vector<std::pair<std::size_t, std::size_t>>& edges)
    : nodes_(std::move(nodes)) {
  std::vector<std::size_t> order(nodes_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return nodes_[a].key < nodes_[b].key; });
  std::vector<std::size_t> rank(nodes_.size());
  std::vector<CountyNode> sorted;
  sorted.reserve(nodes_.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[order[r]] = r;
    sorted.push_back(std::move(nodes_[order[r]]));
  }
  nodes_ = std::move(sorted);
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].key == nodes_[i - 1].key) {
      throw std::invalid_argument("duplicate node key " + to_string(nodes_[i].key));
    }
  }
  adjacency_.assign(nodes_.size(), {});
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    adjacency_[rank[u]].push_back(rank[v]);
    adjacency_[rank[v]].push_back(rank[u]);
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

std::optional<std::size_t> CountyGraph::index_of(const NodeKey& key) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), key,
                                   [](const CountyNode& n, const NodeKey& k) { return n.key < k; });
  if (it == nodes_.end() || it->key != key) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t CountyGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) twice += list.size();
  return twice / 2;
}

VoteCounts CountyGraph::total() const {
  VoteCounts t;
  for (const CountyNode& n : nodes_) t += n.votes;
  return t;
}

bool CountyGraph::connected() const {
  if (nodes_.empty()) return false;
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    ++reached;
    for (std::size_t u : adjacency_[v]) {
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return reached == nodes_.size();
}

bool operator==(const CountyGraph& a, const CountyGraph& b) {
  if (a.nodes_.size() != b.nodes_.size() || a.adjacency_ != b.adjacency_) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const CountyNode& x = a.nodes_[i];
    const CountyNode& y = b.nodes_[i];
    if (x.key != y.key || x.county_name != y.county_name || !(x.votes == y.votes)) return false;
  }
  return true;
}

DistrictPlan::DistrictPlan(const CountyGraph& g, std::vector<int> assignment, int kappa,
                           std::optional<std::pair<std::int64_t, std::int64_t>> bounds)
    : kappa_(kappa), assignment_(std::move(assignment)) {
  if (kappa < 1) throw std::invalid_argument("kappa must be at least 1");
  if (assignment_.size() != g.size()) {
    throw std::invalid_argument("plan assigns " + std::to_string(assignment_.size()) +
                                " nodes but the graph has " + std::to_string(g.size()));
  }
  votes_.assign(static_cast<std::size_t>(kappa), {});
  sizes_.assign(static_cast<std::size_t>(kappa), 0);
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    const int d = assignment_[i];
    if (d < 1 || d > kappa) {
      throw std::invalid_argument("node " + to_string(g.node(i).key) + " has district " +
                                  std::to_string(d) + " outside 1.." + std::to_string(kappa));
    }
    votes_[static_cast<std::size_t>(d - 1)] += g.node(i).votes;
    ++sizes_[static_cast<std::size_t>(d - 1)];
  }
  if (bounds) {
    lo_ = bounds->first;
    hi_ = bounds->second;
  } else {
    lo_ = votes_.front().population();
    hi_ = lo_;
    for (const VoteCounts& v : votes_) {
      lo_ = std::min(lo_, v.population());
      hi_ = std::max(hi_, v.population());
    }
  }
}

void DistrictPlan::reassign(const CountyGraph& g, std::size_t node, int district) {
  const int from = assignment_[node];
  if (from == district) return;
  votes_[static_cast<std::size_t>(from - 1)] -= g.node(node).votes;
  votes_[static_cast<std::size_t>(district - 1)] += g.node(node).votes;
  --sizes_[static_cast<std::size_t>(from - 1)];
  ++sizes_[static_cast<std::size_t>(district - 1)];
  assignment_[node] = district;
}

bool district_connected(const CountyGraph& g, const DistrictPlan& plan, int district,
                        std::optional<std::size_t> skip) {
  std::optional<std::size_t> start;
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (plan.district_of(i) == district && i != skip) {
      if (!start) start = i;
      ++count;
    }
  }
  if (!start) return true;
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> stack{*start};
  seen[*start] = true;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    ++reached;
    for (std::size_t u : g.neighbors(v)) {
      if (!seen[u] && u != skip && plan.district_of(u) == district) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return reached == count;
}

PlanValidation validate_plan(const CountyGraph& g, const DistrictPlan& plan) {
  auto fail = [](std::string why) { return PlanValidation{false, std::move(why)}; };
  if (plan.assignment().size() != g.size()) return fail("plan does not cover the graph");
  std::vector<VoteCounts> recount(static_cast<std::size_t>(plan.kappa()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int d = plan.district_of(i);
    if (d < 1 || d > plan.kappa()) return fail("district " + std::to_string(d) + " out of range");
    recount[static_cast<std::size_t>(d - 1)] += g.node(i).votes;
  }
  for (int d = 1; d <= plan.kappa(); ++d) {
    const std::string name = "district " + std::to_string(d);
    if (plan.district_size(d) == 0) return fail(name + " empty");
    if (!(recount[static_cast<std::size_t>(d - 1)] == plan.votes(d))) {
      return fail(name + " cached totals stale");
    }
    if (!district_connected(g, plan, d)) return fail(name + " disconnected");
    const std::int64_t pop = plan.votes(d).population();
    if (pop < plan.pop_lo() || pop > plan.pop_hi()) {
      return fail(name + " population " + std::to_string(pop) + " outside [" +
                  std::to_string(plan.pop_lo()) + ", " + std::to_string(plan.pop_hi()) + "]");
    }
  }
  return {};
}

PlanStats plan_stats(const CountyGraph& g, const DistrictPlan& plan) {
  if (const auto v = validate_plan(g, plan); !v) throw std::invalid_argument(v.violation);
  return total_effgap(plan.district_votes());
}

namespace {

using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

std::vector<std::string> split_csv_line(const std::string& line, int row) {
  std::vector<std::string> out;
  try {
    Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
    for (const std::string& field : tok) out.push_back(boost::algorithm::trim_copy(field));
  } catch (const boost::escaped_list_error& e) {
    throw DataError("row " + std::to_string(row) + ": malformed CSV (" + e.what() + ")");
  }
  return out;
}

std::int64_t parse_count(const std::string& text, const std::string& column, int row) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size()) {
    throw DataError("row " + std::to_string(row) + ": non-numeric " + column + " '" + text + "'");
  }
  if (v < 0) throw DataError("row " + std::to_string(row) + ": negative " + column);
  return v;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\\") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

CountyData ingest_county_csv(std::istream& in) {
  static const std::vector<std::string> kColumns = {"District",  "County_id", "County",
                                                    "Republicans", "Democrats", "Neighbors"};
  std::string line;
  int row = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (boost::algorithm::trim_copy(line).empty()) continue;
    if (row == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    header = split_csv_line(line, row);
  }
  if (header.empty()) throw DataError("empty input: no header row");
  std::vector<std::size_t> column(kColumns.size());
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    const auto it = std::find(header.begin(), header.end(), kColumns[c]);
    if (it == header.end()) throw DataError("row " + std::to_string(row) + ": missing column " + kColumns[c]);
    column[c] = static_cast<std::size_t>(it - header.begin());
  }

  struct Raw {
    CountyNode node;
    std::vector<NodeKey> neighbors;
  };
  std::vector<Raw> raw;
  std::map<NodeKey, std::size_t> by_key;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (boost::algorithm::trim_copy(line).empty()) continue;
    const auto fields = split_csv_line(line, row);
    auto field = [&](std::size_t c) -> const std::string& {
      if (column[c] >= fields.size()) {
        throw DataError("row " + std::to_string(row) + ": missing field " + kColumns[c]);
      }
      return fields[column[c]];
    };
    Raw r;
    r.node.row = row;
    const std::int64_t district = parse_count(field(0), "District", row);
    r.node.key = {static_cast<int>(district), field(1)};
    if (r.node.key.county_id.empty()) throw DataError("row " + std::to_string(row) + ": empty County_id");
    r.node.county_name = field(2);
    r.node.votes.party_b = parse_count(field(3), "Republicans", row);
    r.node.votes.party_a = parse_count(field(4), "Democrats", row);
    const std::string& nb = field(5);
    std::string token;
    for (std::size_t i = 0; i <= nb.size(); ++i) {
      if (i == nb.size() || nb[i] == ',' || nb[i] == ';') {
        if (!boost::algorithm::trim_copy(token).empty()) {
          try {
            r.neighbors.push_back(parse_node_key(token));
          } catch (const std::invalid_argument& e) {
            throw DataError("row " + std::to_string(row) + ": " + e.what());
          }
        }
        token.clear();
      } else {
        token += nb[i];
      }
    }
    const auto [it, inserted] = by_key.emplace(r.node.key, raw.size());
    if (!inserted) {
      throw DataError("row " + std::to_string(row) + ": duplicate key " + to_string(r.node.key) +
                      " (first seen on row " + std::to_string(raw[it->second].node.row) + ")");
    }
    raw.push_back(std::move(r));
  }
  if (raw.empty()) throw DataError("no data rows");

  CountyData data;
  std::set<std::pair<std::size_t, std::size_t>> listed;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (const NodeKey& k : raw[i].neighbors) {
      const auto it = by_key.find(k);
      if (it == by_key.end()) {
        throw DataError("row " + std::to_string(raw[i].node.row) + ": unknown neighbor " +
                        to_string(k));
      }
      if (it->second == i) {
        data.warnings.push_back("row " + std::to_string(raw[i].node.row) +
                                ": node lists itself as a neighbor; ignored");
        continue;
      }
      listed.emplace(i, it->second);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& [u, v] : listed) {
    if (!listed.count({v, u})) {
      data.warnings.push_back("rows " + std::to_string(raw[u].node.row) + " and " +
                              std::to_string(raw[v].node.row) + ": one-sided neighbor listing " +
                              to_string(raw[u].node.key) + " -> " + to_string(raw[v].node.key) +
                              " symmetrized");
    }
    if (u < v || !listed.count({v, u})) edges.emplace_back(u, v);
  }

  std::vector<CountyNode> nodes;
  for (Raw& r : raw) nodes.push_back(std::move(r.node));
  data.graph = CountyGraph(std::move(nodes), edges);

  std::set<int> numbers;
  for (const CountyNode& n : data.graph.nodes()) numbers.insert(n.key.district);
  data.district_numbers.assign(numbers.begin(), numbers.end());
  std::vector<int> assignment;
  for (const CountyNode& n : data.graph.nodes()) {
    const auto pos = std::lower_bound(data.district_numbers.begin(), data.district_numbers.end(),
                                      n.key.district);
    assignment.push_back(static_cast<int>(pos - data.district_numbers.begin()) + 1);
  }
  const int kappa = static_cast<int>(data.district_numbers.size());
  data.plan = DistrictPlan(data.graph, std::move(assignment), kappa);

  for (int d = 1; d <= kappa; ++d) {
    if (district_connected(data.graph, data.plan, d)) continue;
    std::string rows;
    for (std::size_t i = 0; i < data.graph.size(); ++i) {
      if (data.plan.district_of(i) != d) continue;
      rows += (rows.empty() ? "" : ",") + std::to_string(data.graph.node(i).row);
    }
    throw DataError("district " + std::to_string(data.district_numbers[static_cast<std::size_t>(d - 1)]) +
                    " disconnected (rows " + rows + ")");
  }
  if (!data.graph.connected()) throw DataError("adjacency graph is disconnected");
  return data;
}

CountyData load_county_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return ingest_county_csv(in);
}

void write_county_csv(std::ostream& out, const CountyData& data) {
  const CountyGraph& g = data.graph;
  out << "District,County_id,County,Republicans,Democrats,Neighbors\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const CountyNode& n = g.node(i);
    std::string nb;
    for (std::size_t u : g.neighbors(i)) {
      nb += (nb.empty() ? "" : ",") + to_string(g.node(u).key);
    }
    out << n.key.district << ',' << quote(n.key.county_id) << ',' << quote(n.county_name) << ','
        << n.votes.party_b << ',' << n.votes.party_a << ",\"" << nb << "\"\n";
  }
}

void write_plan_csv(std::ostream& out, const CountyData& data, const DistrictPlan& plan) {
  out << "district,county_id,assigned_district\n";
  for (std::size_t i = 0; i < data.graph.size(); ++i) {
    const NodeKey& k = data.graph.node(i).key;
    out << k.district << ',' << quote(k.county_id) << ','
        << data.district_numbers[static_cast<std::size_t>(plan.district_of(i) - 1)] << '\n';
  }
}

DistrictPlan read_plan_csv(std::istream& in, const CountyData& data) {
  std::string line;
  int row = 0;
  bool header = false;
  std::vector<int> assignment(data.graph.size(), 0);
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (boost::algorithm::trim_copy(line).empty()) continue;
    const auto fields = split_csv_line(line, row);
    if (!header) {
      if (fields.size() < 3 || fields[0] != "district" || fields[1] != "county_id" ||
          fields[2] != "assigned_district") {
        throw DataError("row " + std::to_string(row) +
                        ": expected header district,county_id,assigned_district");
      }
      header = true;
      continue;
    }
    if (fields.size() < 3) throw DataError("row " + std::to_string(row) + ": expected 3 fields");
    const NodeKey key{static_cast<int>(parse_count(fields[0], "district", row)), fields[1]};
    const auto idx = data.graph.index_of(key);
    if (!idx) throw DataError("row " + std::to_string(row) + ": unknown node " + to_string(key));
    if (assignment[*idx] != 0) {
      throw DataError("row " + std::to_string(row) + ": node " + to_string(key) + " assigned twice");
    }
    const auto number = static_cast<int>(parse_count(fields[2], "assigned_district", row));
    const auto pos = std::find(data.district_numbers.begin(), data.district_numbers.end(), number);
    if (pos == data.district_numbers.end()) {
      throw DataError("row " + std::to_string(row) + ": unknown district " + std::to_string(number));
    }
    assignment[*idx] = static_cast<int>(pos - data.district_numbers.begin()) + 1;
  }
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == 0) {
      throw DataError("plan has no row for node " + to_string(data.graph.node(i).key));
    }
  }
  return DistrictPlan(data.graph, std::move(assignment), data.plan.kappa(),
                      std::pair{data.plan.pop_lo(), data.plan.pop_hi()});
}

}  // namespace effgap
