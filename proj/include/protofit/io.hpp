#pragma once

#include "protofit/cluster.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace protofit {

// Raised when a computation produced non-finite values. The CLI maps this
// to its own exit code, distinct from usage and parse errors.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

// Comma-separated signal table: first column is time, the remaining
// columns are one signal each. A header row is detected by a non-numeric
// first cell. Rows are sorted by time; a duplicated time value is an error
// naming the value, a ragged row an error naming the row number.
SignalSet load_signals_csv(const std::filesystem::path& path);

// Moves file: signal_index, from, to per row (0-based), optional header.
std::vector<Move> load_moves_csv(const std::filesystem::path& path);

// Self-describing snapshot of a clustering: assignments, per-cluster
// centroids and weights, coefficients, basis, and the grid fingerprint.
struct StateFile {
  std::vector<int> basis_exponents;
  std::string grid_fingerprint;  // hex
  std::vector<int> assignments;
  std::vector<int> weights;
  std::vector<std::vector<double>> centroids;
  std::vector<std::vector<double>> coefficients;
};

StateFile make_state_file(const ClusterState& state, const ExponentSet& basis,
                          const TimeGrid& grid);
ClusterState state_from_file(const StateFile& file, const TimeGrid& grid);
ExponentSet basis_from_state(const StateFile& file);

void write_state_json(const std::filesystem::path& path, const StateFile& state);
StateFile read_state_json(const std::filesystem::path& path);

std::string fingerprint_hex(std::uint64_t hash);

void write_prototypes_csv(const std::filesystem::path& path,
                          const std::vector<Prototype>& prototypes);
void write_assignments_csv(const std::filesystem::path& path,
                           const std::vector<int>& assignments);

}  // namespace protofit
