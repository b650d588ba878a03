#include "protofit/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace protofit {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && begin != end;
}

bool parse_int(const std::string& cell, int& out) {
  double d = 0.0;
  if (!parse_double(cell, d)) return false;
  const int v = static_cast<int>(d);
  if (static_cast<double>(v) != d) return false;
  out = v;
  return true;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

SignalSet load_signals_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);

  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto cells = split_csv_line(lines[ln]);
    double first = 0.0;
    if (rows.empty() && !parse_double(cells[0], first)) continue;  // header row

    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c]))
        throw std::runtime_error("row " + std::to_string(ln + 1) + ": cannot parse '" +
                                 cells[c] + "'");
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw std::runtime_error("row " + std::to_string(ln + 1) + ": expected " +
                               std::to_string(width) + " columns, got " +
                               std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw std::runtime_error("no data rows in " + path.string());
  if (width < 2) throw std::runtime_error("need a time column and at least one signal column");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a[0] < b[0]; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][0] == rows[i - 1][0])
      throw std::runtime_error("duplicate time " + format_double(rows[i][0]));

  const int n = static_cast<int>(rows.size());
  const int l = static_cast<int>(width) - 1;
  std::vector<double> times(n);
  Eigen::MatrixXd samples(n, l);
  for (int i = 0; i < n; ++i) {
    times[i] = rows[i][0];
    for (int j = 0; j < l; ++j) samples(i, j) = rows[i][j + 1];
  }
  return SignalSet(std::move(samples), TimeGrid(std::move(times)));
}

std::vector<Move> load_moves_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<Move> moves;
  bool saw_data = false;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto cells = split_csv_line(lines[ln]);
    int ignore = 0;
    if (!saw_data && !parse_int(cells[0], ignore)) continue;  // header row
    if (cells.size() != 3)
      throw std::runtime_error("moves row " + std::to_string(ln + 1) +
                               ": expected signal_index,from,to");
    Move mv;
    if (!parse_int(cells[0], mv.signal) || !parse_int(cells[1], mv.from) ||
        !parse_int(cells[2], mv.to))
      throw std::runtime_error("moves row " + std::to_string(ln + 1) + ": cannot parse");
    moves.push_back(mv);
    saw_data = true;
  }
  return moves;
}

std::string fingerprint_hex(std::uint64_t hash) {
  char buf[17];
  auto res = std::to_chars(buf, buf + sizeof(buf), hash, 16);
  return std::string(buf, res.ptr);
}

StateFile make_state_file(const ClusterState& state, const ExponentSet& basis,
                          const TimeGrid& grid) {
  StateFile file;
  file.basis_exponents = basis.exponents();
  file.grid_fingerprint = fingerprint_hex(gram_fingerprint(basis, grid));
  file.assignments = state.assignments;
  for (const Centroid& c : state.centroids) {
    file.weights.push_back(c.weight);
    file.centroids.emplace_back(c.values.data(), c.values.data() + c.values.size());
  }
  for (const Prototype& p : state.prototypes)
    file.coefficients.emplace_back(p.coefficients.data(),
                                   p.coefficients.data() + p.coefficients.size());
  return file;
}

ExponentSet basis_from_state(const StateFile& file) {
  return ExponentSet(file.basis_exponents);
}

ClusterState state_from_file(const StateFile& file, const TimeGrid& grid) {
  const ExponentSet basis = basis_from_state(file);
  if (file.grid_fingerprint != fingerprint_hex(gram_fingerprint(basis, grid)))
    throw std::runtime_error("state file fingerprint does not match input grid/basis");
  if (file.centroids.size() != file.weights.size() ||
      file.centroids.size() != file.coefficients.size() || file.centroids.empty())
    throw std::runtime_error("malformed state file");

  ClusterState state;
  state.assignments = file.assignments;
  const int k = static_cast<int>(file.centroids.size());
  for (int c = 0; c < k; ++c) {
    if (static_cast<int>(file.centroids[c].size()) != grid.size())
      throw std::runtime_error("state centroid length does not match grid");
    Centroid centroid;
    centroid.values = Eigen::Map<const Eigen::VectorXd>(file.centroids[c].data(),
                                                        file.centroids[c].size());
    centroid.weight = file.weights[c];
    state.centroids.push_back(std::move(centroid));
    if (static_cast<int>(file.coefficients[c].size()) != basis.size())
      throw std::runtime_error("state coefficient length does not match basis");
    Prototype p{Eigen::Map<const Eigen::VectorXd>(file.coefficients[c].data(),
                                                  file.coefficients[c].size()),
                basis};
    state.prototypes.push_back(std::move(p));
  }
  for (int a : state.assignments)
    if (a < 0 || a >= k) throw std::runtime_error("state assignment out of range");
  return state;
}

void write_state_json(const std::filesystem::path& path, const StateFile& state) {
  json clusters = json::array();
  for (std::size_t c = 0; c < state.centroids.size(); ++c) {
    clusters.push_back(json{{"centroid", state.centroids[c]},
                            {"coefficients", state.coefficients[c]},
                            {"weight", state.weights[c]}});
  }
  const json doc{{"assignments", state.assignments},
                 {"basis", state.basis_exponents},
                 {"clusters", clusters},
                 {"grid_fingerprint", state.grid_fingerprint}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

StateFile read_state_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("cannot parse " + path.string() + ": " + e.what());
  }
  try {
    StateFile state;
    state.basis_exponents = doc.at("basis").get<std::vector<int>>();
    state.grid_fingerprint = doc.at("grid_fingerprint").get<std::string>();
    state.assignments = doc.at("assignments").get<std::vector<int>>();
    for (const json& cluster : doc.at("clusters")) {
      state.weights.push_back(cluster.at("weight").get<int>());
      state.centroids.push_back(cluster.at("centroid").get<std::vector<double>>());
      state.coefficients.push_back(cluster.at("coefficients").get<std::vector<double>>());
    }
    return state;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed state file " + path.string() + ": " + e.what());
  }
}

void write_prototypes_csv(const std::filesystem::path& path,
                          const std::vector<Prototype>& prototypes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "cluster,exponent,coefficient\n";
  for (std::size_t c = 0; c < prototypes.size(); ++c)
    for (int j = 0; j < prototypes[c].basis.size(); ++j)
      out << c << "," << prototypes[c].basis[j] << ","
          << format_double(prototypes[c].coefficients(j)) << "\n";
}

void write_assignments_csv(const std::filesystem::path& path,
                           const std::vector<int>& assignments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "signal_index,cluster\n";
  for (std::size_t j = 0; j < assignments.size(); ++j)
    out << j << "," << assignments[j] << "\n";
}

}  // namespace protofit
