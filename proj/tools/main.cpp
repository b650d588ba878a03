#include "protofit/cluster.hpp"
#include "protofit/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace protofit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSingular = 3;
constexpr int kExitNumerical = 4;

struct Options {
  std::string input;
  std::string basis_spec;
  std::string output_dir;
  std::string moves_path;
  std::string state_path;
  int k = 1;
  unsigned seed = 0;
  double tol = 1e-9;
  int max_iter = 100;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  bool verify_batch = false;
};

ExponentSet parse_basis(const std::string& spec) {
  std::vector<int> degrees;
  std::string token;
  std::stringstream ss(spec);
  while (std::getline(ss, token, ',')) {
    try {
      degrees.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw std::runtime_error("cannot parse basis exponent '" + token + "'");
    }
  }
  return make_exponent_set(std::move(degrees));
}

void ensure_finite(const ClusterState& state) {
  for (const Prototype& p : state.prototypes)
    if (!p.coefficients.allFinite()) throw NumericalError("non-finite prototype coefficients");
  for (const Centroid& c : state.centroids)
    if (!c.values.allFinite()) throw NumericalError("non-finite centroid");
  if (!std::isfinite(state.objective)) throw NumericalError("non-finite objective");
}

void write_summary(const fs::path& dir, const json& summary) {
  std::ofstream out(dir / "summary.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary.json");
  out << summary.dump(2) << "\n";
}

void write_artifacts(const fs::path& dir, const ClusterState& state, const ExponentSet& basis,
                     const TimeGrid& grid) {
  fs::create_directories(dir);
  write_prototypes_csv(dir / "prototypes.csv", state.prototypes);
  write_assignments_csv(dir / "assignments.csv", state.assignments);
  write_state_json(dir / "state.json", make_state_file(state, basis, grid));
}

const char* mode_name(SolverMode mode) {
  return mode == SolverMode::inverse ? "inverse" : "svd";
}

int run_check_basis(const Options& opt) {
  const SignalSet signals = load_signals_csv(opt.input);
  const ExponentSet basis = parse_basis(opt.basis_spec);
  const double tol = opt.tol > 0 ? opt.tol : kDefaultRankTol;

  const InvertibilityReport report = is_gram_invertible(basis, signals.grid(), tol);
  const SolverHandle handle = precompute_solver(basis, signals.grid(), tol);

  json doc{{"command", "check-basis"},
           {"basis", basis.exponents()},
           {"invertible", report.invertible},
           {"solver_mode", mode_name(handle.mode())},
           {"grid_fingerprint", fingerprint_hex(gram_fingerprint(basis, signals.grid()))}};
  doc["certificate"] = report.certificate ? json(*report.certificate) : json(nullptr);
  doc["schur_value"] = report.schur_value ? json(*report.schur_value) : json(nullptr);
  std::cout << doc.dump(2) << "\n";
  return report.invertible ? kExitOk : kExitSingular;
}

int run_fit(const Options& opt) {
  const SignalSet signals = load_signals_csv(opt.input);
  const ExponentSet basis = parse_basis(opt.basis_spec);

  const SolverHandle handle = precompute_solver(basis, signals.grid(), kDefaultRankTol);
  ClusterState state;
  state.assignments.assign(signals.num_signals(), 0);
  state.centroids.push_back(centroid(signals));
  state.prototypes.push_back(solve_with_handle(handle, state.centroids[0]));
  state.objective = total_objective(signals, state.assignments, state.prototypes);
  state.iterations = 1;

  ensure_finite(state);
  write_artifacts(opt.output_dir, state, basis, signals.grid());
  write_summary(opt.output_dir, json{{"command", "fit"},
                                     {"objective", state.objective},
                                     {"iterations", state.iterations},
                                     {"k", 1},
                                     {"solver_mode", mode_name(handle.mode())}});
  return kExitOk;
}

int run_cluster(const Options& opt) {
  const SignalSet signals = load_signals_csv(opt.input);
  const ExponentSet basis = parse_basis(opt.basis_spec);

  KMeansConfig config;
  config.max_iter = opt.max_iter;
  config.seed = opt.seed;
  config.tol = opt.tol;
  config.threads = std::max(1, opt.threads);

  const ClusterState state = kmeans_curves(signals, basis, opt.k, config);
  const SolverHandle handle = precompute_solver(basis, signals.grid(), kDefaultRankTol);

  ensure_finite(state);
  write_artifacts(opt.output_dir, state, basis, signals.grid());
  write_summary(opt.output_dir, json{{"command", "cluster"},
                                     {"objective", state.objective},
                                     {"iterations", state.iterations},
                                     {"k", opt.k},
                                     {"seed", opt.seed},
                                     {"solver_mode", mode_name(handle.mode())}});
  return kExitOk;
}

int run_update(const Options& opt) {
  using clock = std::chrono::steady_clock;

  const SignalSet signals = load_signals_csv(opt.input);
  const StateFile file = read_state_json(opt.state_path);
  const ExponentSet basis = basis_from_state(file);
  const ClusterState prior = state_from_file(file, signals.grid());
  const std::vector<Move> moves = load_moves_csv(opt.moves_path);
  const int k = static_cast<int>(prior.prototypes.size());

  const SolverHandle handle = precompute_solver(basis, signals.grid(), kDefaultRankTol);
  const std::vector<SolverHandle> bank(k, handle);

  const auto t0 = clock::now();
  const ClusterState updated = apply_membership_moves(prior, signals, moves, bank);
  const auto t1 = clock::now();
  const double incremental_seconds = std::chrono::duration<double>(t1 - t0).count();

  ensure_finite(updated);

  json summary{{"command", "update"},
               {"objective", updated.objective},
               {"iterations", updated.iterations},
               {"k", k},
               {"moves_applied", moves.size()},
               {"solver_mode", mode_name(handle.mode())}};
  json timing{{"incremental_seconds", incremental_seconds}};

  if (opt.verify_batch) {
    const auto t2 = clock::now();
    std::vector<int> counts(k, 0);
    for (int a : updated.assignments) ++counts[a];
    ClusterState batch;
    batch.assignments = updated.assignments;
    const SolverHandle fresh = precompute_solver(basis, signals.grid(), kDefaultRankTol);
    for (int c = 0; c < k; ++c) {
      Eigen::MatrixXd members(signals.num_points(), counts[c]);
      int at = 0;
      for (int j = 0; j < signals.num_signals(); ++j)
        if (updated.assignments[j] == c) members.col(at++) = signals.samples().col(j);
      batch.centroids.push_back(centroid(SignalSet(members, signals.grid())));
      batch.prototypes.push_back(solve_with_handle(fresh, batch.centroids[c]));
    }
    batch.objective = total_objective(signals, batch.assignments, batch.prototypes);
    const auto t3 = clock::now();
    timing["batch_seconds"] = std::chrono::duration<double>(t3 - t2).count();

    for (int c = 0; c < k; ++c) {
      const double dc = (batch.centroids[c].values - updated.centroids[c].values).cwiseAbs().maxCoeff();
      const double dx =
          (batch.prototypes[c].coefficients - updated.prototypes[c].coefficients).cwiseAbs().maxCoeff();
      if (dc > 1e-9 || dx > 1e-9)
        throw NumericalError("incremental update diverged from batch rebuild");
    }
  }
  summary["timing"] = timing;

  write_artifacts(opt.output_dir, updated, basis, signals.grid());
  write_summary(opt.output_dir, summary);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curve prototype fitting and clustering with Gram-matrix diagnostics"};
  app.require_subcommand(1);

  Options opt;

  auto add_common = [&](CLI::App* cmd, bool needs_basis) {
    cmd->add_option("--input", opt.input, "signals CSV (time column + one column per signal)")
        ->required();
    if (needs_basis)
      cmd->add_option("--basis", opt.basis_spec, "comma-separated monomial exponents, e.g. \"2,0\"")
          ->required();
    cmd->add_option("--tol", opt.tol, "tolerance (rank / convergence)");
    cmd->add_option("--threads", opt.threads, "worker threads for the assignment step");
  };

  CLI::App* check = app.add_subcommand("check-basis", "decide Gram-matrix invertibility");
  add_common(check, true);

  CLI::App* fit = app.add_subcommand("fit", "fit one prototype to all signals");
  add_common(fit, true);
  fit->add_option("--output-dir", opt.output_dir, "artifact directory")->required();

  CLI::App* cluster = app.add_subcommand("cluster", "k-means clustering with prototype centers");
  add_common(cluster, true);
  cluster->add_option("--k", opt.k, "number of clusters")->required();
  cluster->add_option("--seed", opt.seed, "random seed for initialization");
  cluster->add_option("--max-iter", opt.max_iter, "iteration cap");
  cluster->add_option("--output-dir", opt.output_dir, "artifact directory")->required();

  CLI::App* update = app.add_subcommand("update", "apply membership moves to a saved state");
  add_common(update, false);
  update->add_option("--state", opt.state_path, "prior state.json")->required();
  update->add_option("--moves", opt.moves_path, "moves CSV: signal_index,from,to")->required();
  update->add_option("--output-dir", opt.output_dir, "artifact directory")->required();
  update->add_flag("--verify-batch", opt.verify_batch,
                   "also rebuild from scratch, compare, and report both timings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(check)) return run_check_basis(opt);
    if (app.got_subcommand(fit)) return run_fit(opt);
    if (app.got_subcommand(cluster)) return run_cluster(opt);
    return run_update(opt);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
