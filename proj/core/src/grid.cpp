#include "effgap/grid.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace effgap {

namespace {

constexpr int kRowStep[4] = {-1, 0, 0, 1};
constexpr int kColStep[4] = {0, -1, 1, 0};

std::string cell_text(Cell c) {
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

// Next line that is neither blank nor a comment, split into tokens.
bool next_record(std::istream& in, std::vector<std::string>& tokens, int& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    tokens.clear();
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    if (!tokens.empty()) return true;
  }
  return false;
}

long long to_integer(const std::string& tok, int line_no) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": expected integer, got '" +
                             tok + "'");
  }
  return v;
}

}  // namespace

GridPolygon::GridPolygon(int rows, int cols, std::vector<GridCell> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("grid dimensions must be positive");
  std::sort(cells_.begin(), cells_.end(),
            [](const GridCell& a, const GridCell& b) { return a.at < b.at; });
  index_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), -1);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell c = cells_[i].at;
    if (c.row < 0 || c.row >= rows || c.col < 0 || c.col >= cols) {
      throw std::invalid_argument("cell " + cell_text(c) + " outside the grid");
    }
    if (cells_[i].votes.party_a < 0 || cells_[i].votes.party_b < 0) {
      throw std::invalid_argument("cell " + cell_text(c) + " has negative votes");
    }
    int& slot = index_[static_cast<std::size_t>(c.row * cols + c.col)];
    if (slot != -1) throw std::invalid_argument("cell " + cell_text(c) + " listed twice");
    slot = static_cast<int>(i);
  }
  adjacency_.resize(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell c = cells_[i].at;
    for (int d = 0; d < 4; ++d) {
      if (auto j = index_of({c.row + kRowStep[d], c.col + kColStep[d]})) {
        adjacency_[i].push_back(*j);
      }
    }
    std::sort(adjacency_[i].begin(), adjacency_[i].end());
  }
}

GridPolygon GridPolygon::rectangle(int rows, int cols, std::span<const VoteCounts> votes) {
  if (votes.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw std::invalid_argument("rectangle needs rows*cols vote entries");
  }
  std::vector<GridCell> cells;
  cells.reserve(votes.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      cells.push_back({{r, c}, votes[static_cast<std::size_t>(r * cols + c)]});
    }
  }
  return GridPolygon(rows, cols, std::move(cells));
}

std::optional<std::size_t> GridPolygon::index_of(Cell c) const {
  if (c.row < 0 || c.row >= rows_ || c.col < 0 || c.col >= cols_) return std::nullopt;
  const int slot = index_[static_cast<std::size_t>(c.row * cols_ + c.col)];
  if (slot < 0) return std::nullopt;
  return static_cast<std::size_t>(slot);
}

VoteCounts GridPolygon::total() const {
  VoteCounts t;
  for (const GridCell& c : cells_) t += c.votes;
  return t;
}

std::int64_t GridPolygon::max_cell_population() const {
  std::int64_t best = 0;
  for (const GridCell& c : cells_) best = std::max(best, c.votes.population());
  return best;
}

bool operator==(const GridPolygon& a, const GridPolygon& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.cells_.size() != b.cells_.size()) return false;
  for (std::size_t i = 0; i < a.cells_.size(); ++i) {
    if (a.cells_[i].at != b.cells_[i].at || !(a.cells_[i].votes == b.cells_[i].votes)) {
      return false;
    }
  }
  return true;
}

PopulationMode PopulationMode::near(Rational delta) {
  if (delta < 0) throw std::invalid_argument("delta must be non-negative");
  return PopulationMode(true, delta);
}

std::optional<PopulationMode::Window> PopulationMode::window(std::int64_t total_pop,
                                                             int kappa) const {
  if (kappa < 1) throw std::invalid_argument("kappa must be at least 1");
  if (!near_) {
    if (total_pop % kappa != 0) return std::nullopt;
    return Window{total_pop / kappa, total_pop / kappa};
  }
  const Rational lo = (Rational(1, kappa) - delta_) * total_pop;
  const Rational hi = (Rational(1, kappa) + delta_) * total_pop;
  auto ceil_of = [](const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
    return q;
  };
  auto floor_of = [](const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
    return q;
  };
  Window w{std::max<std::int64_t>(0, ceil_of(lo)), std::min(total_pop, floor_of(hi))};
  if (w.lo > w.hi) return std::nullopt;
  return w;
}

std::string PopulationMode::describe() const {
  return near_ ? "near(" + to_string(delta_) + ")" : "exact";
}

bool is_connected(const GridPolygon& p, const std::vector<bool>& member) {
  std::size_t start = p.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (member[i]) {
      if (start == p.size()) start = i;
      ++count;
    }
  }
  if (count == 0) return false;
  std::vector<bool> seen(p.size(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    ++reached;
    for (std::size_t u : p.neighbors(v)) {
      if (member[u] && !seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return reached == count;
}

ValidationReport validate_polygon(const GridPolygon& p) {
  if (p.empty()) return ValidationReport::fail("empty polygon");
  const std::vector<bool> all(p.size(), true);
  if (!is_connected(p, all)) {
    // Report the first cell not reachable from cell 0.
    std::vector<bool> seen(p.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u : p.neighbors(v)) {
        if (!seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
    const auto it = std::find(seen.begin(), seen.end(), false);
    return ValidationReport::fail("disconnected",
                                  p.cell(static_cast<std::size_t>(it - seen.begin())));
  }
  // Hole check: flood the complement inside a one-cell frame around the grid.
  const int fr = p.rows() + 2;
  const int fc = p.cols() + 2;
  std::vector<bool> outside(static_cast<std::size_t>(fr * fc), false);
  auto blocked = [&](int r, int c) { return p.contains({r - 1, c - 1}); };
  std::deque<std::pair<int, int>> queue{{0, 0}};
  outside[0] = true;
  while (!queue.empty()) {
    const auto [r, c] = queue.front();
    queue.pop_front();
    for (int d = 0; d < 4; ++d) {
      const int nr = r + kRowStep[d];
      const int nc = c + kColStep[d];
      if (nr < 0 || nr >= fr || nc < 0 || nc >= fc) continue;
      const auto slot = static_cast<std::size_t>(nr * fc + nc);
      if (outside[slot] || blocked(nr, nc)) continue;
      outside[slot] = true;
      queue.emplace_back(nr, nc);
    }
  }
  for (int r = 1; r + 1 < fr; ++r) {
    for (int c = 1; c + 1 < fc; ++c) {
      if (!blocked(r, c) && !outside[static_cast<std::size_t>(r * fc + c)]) {
        return ValidationReport::fail("hole", Cell{r - 1, c - 1});
      }
    }
  }
  return ValidationReport::pass();
}

ValidationReport validate_partition(const GridPolygon& p, const GridPartition& q, int kappa,
                                    const PopulationMode& mode) {
  if (kappa < 2 || static_cast<std::size_t>(kappa) > p.size()) {
    throw std::invalid_argument("kappa must satisfy 1 < kappa <= |P| (kappa=" +
                                std::to_string(kappa) + ", |P|=" + std::to_string(p.size()) +
                                ")");
  }
  if (q.labels.size() != p.size()) return ValidationReport::fail("partition does not cover polygon");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q.labels[i] < 1 || q.labels[i] > kappa) {
      return ValidationReport::fail("label out of range", p.cell(i));
    }
  }
  const std::int64_t total = p.total().population();
  const auto window = mode.window(total, kappa);
  for (int label = 1; label <= kappa; ++label) {
    std::vector<bool> member(p.size(), false);
    VoteCounts votes;
    std::optional<Cell> first;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (q.labels[i] == label) {
        member[i] = true;
        votes += p.votes(i);
        if (!first) first = p.cell(i);
      }
    }
    const std::string name = "label " + std::to_string(label);
    if (!first) return ValidationReport::fail(name + " empty");
    if (!is_connected(p, member)) return ValidationReport::fail(name + " disconnected", first);
    if (!window || !window->contains(votes.population())) {
      return ValidationReport::fail(name + " population " + std::to_string(votes.population()) +
                                        " violates " + mode.describe() + " bounds",
                                    first);
    }
  }
  return ValidationReport::pass();
}

bool is_simply_connected(const GridPolygon& p, const std::vector<bool>& member) {
  if (!is_connected(p, member)) return false;
  const int fr = p.rows() + 2;
  const int fc = p.cols() + 2;
  auto inside = [&](int r, int c) {
    const auto idx = p.index_of({r - 1, c - 1});
    return idx && member[*idx];
  };
  std::vector<bool> reached(static_cast<std::size_t>(fr * fc), false);
  std::vector<std::pair<int, int>> stack{{0, 0}};
  reached[0] = true;
  while (!stack.empty()) {
    const auto [r, c] = stack.back();
    stack.pop_back();
    for (int d = 0; d < 4; ++d) {
      const int nr = r + kRowStep[d];
      const int nc = c + kColStep[d];
      if (nr < 0 || nr >= fr || nc < 0 || nc >= fc) continue;
      const auto slot = static_cast<std::size_t>(nr * fc + nc);
      if (reached[slot] || inside(nr, nc)) continue;
      reached[slot] = true;
      stack.emplace_back(nr, nc);
    }
  }
  for (int r = 0; r < fr; ++r) {
    for (int c = 0; c < fc; ++c) {
      if (!inside(r, c) && !reached[static_cast<std::size_t>(r * fc + c)]) return false;
    }
  }
  return true;
}

bool is_y_convex(const GridPolygon& p, const GridPartition& q, int kappa) {
  for (int label = 1; label <= kappa; ++label) {
    for (int col = 0; col < p.cols(); ++col) {
      int state = 0;  // 0 before, 1 inside, 2 after the run
      for (int row = 0; row < p.rows(); ++row) {
        const auto idx = p.index_of({row, col});
        const bool in = idx && q.labels[*idx] == label;
        if (in) {
          if (state == 2) return false;
          state = 1;
        } else if (state == 1) {
          state = 2;
        }
      }
    }
  }
  return true;
}

std::vector<VoteCounts> district_votes(const GridPolygon& p, const GridPartition& q, int kappa) {
  std::vector<VoteCounts> out(static_cast<std::size_t>(kappa));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int label = q.labels.at(i);
    if (label < 1 || label > kappa) throw std::invalid_argument("label out of range");
    out[static_cast<std::size_t>(label - 1)] += p.votes(i);
  }
  return out;
}

PlanStats partition_stats(const GridPolygon& p, const GridPartition& q, int kappa) {
  const auto votes = district_votes(p, q, kappa);
  return total_effgap(votes);
}

GridInstance read_grid_instance(std::istream& in) {
  std::vector<std::string> tok;
  int line_no = 0;
  if (!next_record(in, tok, line_no)) throw std::runtime_error("grid file: missing header");
  if (tok.size() != 3) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": header must be 'm n kappa'");
  }
  const int rows = static_cast<int>(to_integer(tok[0], line_no));
  const int cols = static_cast<int>(to_integer(tok[1], line_no));
  const int kappa = static_cast<int>(to_integer(tok[2], line_no));
  if (rows <= 0 || cols <= 0) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": grid dimensions must be positive");
  }
  std::vector<GridCell> cells;
  while (next_record(in, tok, line_no)) {
    if (tok.size() != 4) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 'row col party_a party_b'");
    }
    GridCell c;
    c.at.row = static_cast<int>(to_integer(tok[0], line_no));
    c.at.col = static_cast<int>(to_integer(tok[1], line_no));
    c.votes.party_a = to_integer(tok[2], line_no);
    c.votes.party_b = to_integer(tok[3], line_no);
    cells.push_back(c);
  }
  try {
    return GridInstance{GridPolygon(rows, cols, std::move(cells)), kappa};
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("grid file: ") + e.what());
  }
}

void write_grid_instance(std::ostream& out, const GridInstance& instance) {
  const GridPolygon& p = instance.polygon;
  out << p.rows() << ' ' << p.cols() << ' ' << instance.kappa << '\n';
  for (const GridCell& c : p.cells()) {
    out << c.at.row << ' ' << c.at.col << ' ' << c.votes.party_a << ' ' << c.votes.party_b << '\n';
  }
}

GridInstance load_grid_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file '" + path + "'");
  return read_grid_instance(in);
}

void write_partition(std::ostream& out, const GridPolygon& p, const GridPartition& q) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << p.cell(i).row << ' ' << p.cell(i).col << ' ' << q.labels.at(i) << '\n';
  }
}

GridPartition read_partition(std::istream& in, const GridPolygon& p) {
  GridPartition q;
  q.labels.assign(p.size(), 0);
  std::vector<std::string> tok;
  int line_no = 0;
  while (next_record(in, tok, line_no)) {
    if (tok.size() != 3) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 'row col label'");
    }
    const Cell c{static_cast<int>(to_integer(tok[0], line_no)),
                 static_cast<int>(to_integer(tok[1], line_no))};
    const auto idx = p.index_of(c);
    if (!idx) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": cell " + cell_text(c) +
                               " not in polygon");
    }
    q.labels[*idx] = static_cast<int>(to_integer(tok[2], line_no));
  }
  return q;
}

std::string render_partition(const GridPolygon& p, const GridPartition& q) {
  std::string out;
  for (int r = 0; r < p.rows(); ++r) {
    for (int c = 0; c < p.cols(); ++c) {
      const auto idx = p.index_of({r, c});
      if (c > 0) out += ' ';
      if (!idx) {
        out += '.';
      } else {
        const int label = q.labels.at(*idx);
        out += label < 10 ? static_cast<char>('0' + label) : static_cast<char>('a' + label - 10);
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace effgap
