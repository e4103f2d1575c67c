#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "nilcayley/cayley.hpp"
#include "nilcayley/group.hpp"
#include "nilcayley/stats.hpp"

namespace nilcayley {

enum class SamplingMode {
  iid_generators,            // z_1..z_k i.i.d. uniform, redrawn until they generate
  uniform_symmetric_subset,  // uniform symmetric S with |S| = 2k, no involutions
};

std::string to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(std::string_view text);

inline constexpr int kRejectionBudget = 10'000;

/// Draws a generating set by rejection. In uniform_symmetric_subset mode the k
/// draws must be non-identity, non-involutions, pairwise distinct up to
/// inversion, and generate; accepted sets are then uniform over symmetric
/// generating sets with k inverse pairs. Throws SamplingError when the budget
/// of candidate draws runs out.
GeneratingSet sample_generating_set(const GroupSpec& spec, int k, SamplingMode mode, std::mt19937_64& rng,
                                    int budget = kRejectionBudget, int* rejections = nullptr);

/// Flat key=value run description. Keys: source (group|lattice), spec, k,
/// trials, mode, seed, layers, memory_cap, eps, lattice_q, max_evaluations.
struct RunConfig {
  enum class Source { group, lattice };

  Source source = Source::group;
  std::string spec = "ut:5,3";
  int k = 3;
  std::uint64_t trials = 100;
  SamplingMode mode = SamplingMode::iid_generators;
  std::uint64_t seed = 1;
  bool layers = false;
  std::uint64_t memory_cap = std::uint64_t{4} << 30;
  double eps = 1e-2;
  std::int64_t lattice_q = 1'000'003;
  std::uint64_t max_evaluations = 4'000'000;

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
  std::string to_text() const;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::string spec;
  int k = 0;
  SamplingMode mode = SamplingMode::iid_generators;
  std::vector<Code> generators;
  std::uint32_t diam = 0;
  std::uint32_t diam_ab = 0;
  double x = 0;     // diam / |G^ab|^(1/k)
  double x_ab = 0;  // diam_ab / |G^ab|^(1/k)
  double eps = 0;   // x - x_ab
  std::optional<FiltrationReport> layers;
  std::string error;
  int exit_code = 0;
  double wall_seconds = 0;  // reported separately, never in the JSONL line

  bool ok() const noexcept { return error.empty(); }
  /// One JSON object, no trailing newline. Deterministic for fixed inputs.
  std::string to_jsonl() const;
};

/// Diameter rescaling |G^ab|^(1/k).
double rescaling_factor(const GroupSpec& spec, int k);

using TrialSink = std::function<void(const TrialRecord&)>;

/// N independent trials; trial t draws from derive_seed(config.seed, t). Records
/// reach the sink in trial order whatever the completion order; per-trial
/// errors are recorded in the record and do not stop the batch.
std::vector<TrialRecord> run_trials(const RunConfig& config, const TrialSink& sink = {});

struct LatticeSample {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::string descriptor;  // integer lattice before rescaling
  double lo = 0, hi = 0;   // enclosure of the torus diameter
  double value() const { return 0.5 * (lo + hi); }
};

/// Torus diameters of config.trials Haar-proxy lattices (k, lattice_q, eps).
std::vector<LatticeSample> run_lattice_samples(const RunConfig& config);

/// Rescaled values a config produces: X per successful group trial, or torus
/// diameter midpoints for a lattice config.
std::vector<double> rescaled_samples(const RunConfig& config);

struct CompareReport {
  EmpiricalDistribution a, b;
  double ks = 0;
  static constexpr std::array<double, 5> kLevels{0.05, 0.25, 0.5, 0.75, 0.95};
  std::array<double, 5> quantiles_a{}, quantiles_b{};

  std::string summary() const;
  /// Two-column TSV (value, cdf) for one side.
  static void write_cdf_tsv(const EmpiricalDistribution& d, const std::filesystem::path& path);
};

CompareReport compare_samples(std::vector<double> a, std::vector<double> b);
CompareReport compare_experiment(const RunConfig& a, const RunConfig& b);

struct ScalingConfig {
  int d = 3;
  int k = 3;
  std::vector<std::int64_t> qs{31, 61, 101};
  std::uint64_t trials = 10;
  SamplingMode mode = SamplingMode::iid_generators;
  std::uint64_t seed = 1;
  std::uint64_t memory_cap = std::uint64_t{4} << 30;

  /// Keys: d, k, qs (comma list), trials, mode, seed, memory_cap.
  static ScalingConfig parse(std::string_view text);
};

struct ScalingRow {
  std::int64_t q = 0;
  int i = 0;
  double mean_diam = 0;
  std::uint32_t max_diam = 0;
  double mean_ratio = 0;  // diam(G^(i), S) / q^((d-1)/(i k))
  double max_ratio = 0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  /// Least-squares slope of log(mean diam(G^(i), S)) against log q, per i;
  /// NaN where the mean is zero.
  std::vector<std::pair<int, double>> slopes;
  std::string to_tsv() const;
};

/// Diameters of every lower-central-series term of H_{q,d} over a q grid.
/// Exploratory: nothing about the exponents is asserted.
ScalingTable filtration_scaling_experiment(const ScalingConfig& config);

}  // namespace nilcayley
