#include "nilcayley/harness.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "nilcayley/errors.hpp"
#include "nilcayley/lattice.hpp"
#include "nilcayley/rng.hpp"

namespace nilcayley {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// key=value lines, '#' starts a comment
std::map<std::string, std::string> parse_kv(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw PreconditionError("config line " + std::to_string(line_no) + " has no '='");
    kv[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw PreconditionError("config key '" + key + "' expects an unsigned integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    auto x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw PreconditionError("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw PreconditionError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string to_string(SamplingMode mode) {
  return mode == SamplingMode::iid_generators ? "iid-generators" : "uniform-symmetric-subset";
}

SamplingMode parse_sampling_mode(std::string_view text) {
  if (text == "iid-generators" || text == "iid") return SamplingMode::iid_generators;
  if (text == "uniform-symmetric-subset" || text == "symmetric") return SamplingMode::uniform_symmetric_subset;
  throw PreconditionError("unknown sampling mode '" + std::string(text) + "'");
}

GeneratingSet sample_generating_set(const GroupSpec& spec, int k, SamplingMode mode, std::mt19937_64& rng,
                                    int budget, int* rejections) {
  if (k < 1) throw PreconditionError("k must be >= 1");
  int rejected = 0;
  std::vector<Code> z(k);
  for (int attempt = 0; attempt < budget; ++attempt) {
    for (auto& e : z) e = uniform_below(rng, spec.order());
    bool ok = true;
    if (mode == SamplingMode::uniform_symmetric_subset) {
      std::vector<Code> closure;
      for (Code e : z) {
        const Code ei = inv(spec, e);
        if (e == 0 || e == ei) {
          ok = false;
          break;
        }
        closure.push_back(e);
        closure.push_back(ei);
      }
      if (ok) {
        std::sort(closure.begin(), closure.end());
        ok = std::adjacent_find(closure.begin(), closure.end()) == closure.end();
      }
    }
    if (ok && generates(spec, z)) {
      if (rejections) *rejections = rejected;
      return GeneratingSet(spec, z);
    }
    ++rejected;
  }
  if (rejections) *rejections = rejected;
  throw SamplingError("no generating set of size " + std::to_string(k) + " for " + spec.descriptor() +
                      " after " + std::to_string(budget) + " draws");
}

// ---------------------------------------------------------------------------
// RunConfig

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  for (const auto& [key, v] : parse_kv(text)) {
    if (key == "source") {
      if (v == "group") c.source = Source::group;
      else if (v == "lattice") c.source = Source::lattice;
      else throw PreconditionError("source must be 'group' or 'lattice'");
    } else if (key == "spec") {
      c.spec = v;
    } else if (key == "k") {
      c.k = static_cast<int>(to_u64(key, v));
    } else if (key == "trials" || key == "N") {
      c.trials = to_u64(key, v);
    } else if (key == "mode") {
      c.mode = parse_sampling_mode(v);
    } else if (key == "seed") {
      c.seed = to_u64(key, v);
    } else if (key == "layers") {
      c.layers = to_bool(key, v);
    } else if (key == "memory_cap") {
      c.memory_cap = to_u64(key, v);
    } else if (key == "eps") {
      c.eps = to_double(key, v);
    } else if (key == "lattice_q") {
      c.lattice_q = static_cast<std::int64_t>(to_u64(key, v));
    } else if (key == "max_evaluations") {
      c.max_evaluations = to_u64(key, v);
    } else {
      throw PreconditionError("unknown config key '" + key + "'");
    }
  }
  if (c.source == Source::group) (void)GroupSpec::parse(c.spec);
  if (c.k < 1) throw PreconditionError("k must be >= 1");
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw PreconditionError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "source=" << (source == Source::group ? "group" : "lattice") << "\n";
  if (source == Source::group) os << "spec=" << spec << "\n";
  os << "k=" << k << "\ntrials=" << trials << "\nmode=" << to_string(mode) << "\nseed=" << seed
     << "\nlayers=" << (layers ? "on" : "off") << "\nmemory_cap=" << memory_cap << "\neps=" << fmt_double(eps)
     << "\nlattice_q=" << lattice_q << "\nmax_evaluations=" << max_evaluations << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Trials

std::string TrialRecord::to_jsonl() const {
  nlohmann::ordered_json j;
  j["trial"] = trial;
  j["seed"] = seed;
  j["spec"] = spec;
  j["k"] = k;
  j["mode"] = to_string(mode);
  j["generators"] = generators;
  if (ok()) {
    j["diam"] = diam;
    j["diam_ab"] = diam_ab;
    j["X"] = x;
    j["X_ab"] = x_ab;
    j["eps"] = eps;
    if (layers) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& r : layers->rows)
        arr.push_back({{"i", r.i}, {"subgroup", r.subgroup}, {"quotient", r.quotient}});
      j["layers"] = arr;
    }
  } else {
    j["error"] = error;
    j["exit_code"] = exit_code;
  }
  return j.dump();
}

double rescaling_factor(const GroupSpec& spec, int k) {
  return std::pow(static_cast<double>(spec.layer_order(1)), 1.0 / k);
}

namespace {

TrialRecord run_one(const RunConfig& config, const GroupSpec& spec, std::uint64_t t) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.trial = t;
  rec.seed = derive_seed(config.seed, t);
  rec.spec = spec.descriptor();
  rec.k = config.k;
  rec.mode = config.mode;
  try {
    std::mt19937_64 rng(rec.seed);
    const GeneratingSet gens = sample_generating_set(spec, config.k, config.mode, rng);
    rec.generators = gens.positives();
    const GroupSpec ab = spec.abelianisation();
    const GeneratingSet ab_gens = gens.abelianised(spec);
    BfsOptions opts;
    opts.memory_cap_bytes = config.memory_cap;
    if (config.layers) {
      const DistanceMap dm = bfs_distance_map(spec, gens, opts);
      const DistanceMap ab_map = bfs_distance_map(ab, ab_gens, opts);
      rec.layers = filtration_report(dm, ab_map);
      rec.diam = rec.layers->diam;
      rec.diam_ab = rec.layers->diam_ab;
    } else {
      const BfsSummary full = bfs_eccentricity(spec, gens, opts);
      const BfsSummary quotient = bfs_eccentricity(ab, ab_gens, opts);
      if (!full.complete(spec) || !quotient.complete(ab))
        throw NotGeneratingError("sampled set does not generate");
      rec.diam = full.eccentricity;
      rec.diam_ab = quotient.eccentricity;
    }
    const double scale = rescaling_factor(spec, config.k);
    rec.x = rec.diam / scale;
    rec.x_ab = rec.diam_ab / scale;
    rec.eps = rec.x - rec.x_ab;
  } catch (const Error& e) {
    rec.error = e.what();
    rec.exit_code = static_cast<int>(e.exit_code());
  }
  rec.wall_seconds = elapsed(t0);
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_trials(const RunConfig& config, const TrialSink& sink) {
  if (config.source != RunConfig::Source::group) throw PreconditionError("run_trials needs a group config");
  const GroupSpec spec = GroupSpec::parse(config.spec);
  if (config.k <= spec.rank())
    std::cerr << "warning: k=" << config.k << " <= rank " << spec.rank() << " of " << spec.descriptor()
              << "; the limit theorems assume k > rank\n";

  std::vector<TrialRecord> records(config.trials);
  std::mutex mu;
  std::uint64_t next_to_emit = 0;
  std::vector<bool> done(config.trials, false);
  auto finish = [&](std::uint64_t t) {
    std::lock_guard lock(mu);
    done[t] = true;
    while (next_to_emit < config.trials && done[next_to_emit]) {
      if (sink) sink(records[next_to_emit]);
      ++next_to_emit;
    }
  };

  // Trial-level parallelism when the per-trial working sets fit side by side;
  // otherwise trials run one after another and the BFS kernel itself is parallel.
  const int threads = omp_get_max_threads();
  const GeneratingSet probe(spec, std::vector<Code>(config.k * 2, 1 % spec.order()));
  std::uint64_t per_trial = kernel_memory_estimate(spec, probe);
  if (config.layers) per_trial += spec.order() * 2;
  const bool trial_parallel = threads > 1 && per_trial * threads <= config.memory_cap;
  const auto n = static_cast<std::int64_t>(config.trials);
  if (trial_parallel) {
    const int saved = omp_get_max_active_levels();
    omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t t = 0; t < n; ++t) {
      records[t] = run_one(config, spec, static_cast<std::uint64_t>(t));
      finish(static_cast<std::uint64_t>(t));
    }
    omp_set_max_active_levels(saved);
  } else {
    for (std::int64_t t = 0; t < n; ++t) {
      records[t] = run_one(config, spec, static_cast<std::uint64_t>(t));
      finish(static_cast<std::uint64_t>(t));
    }
  }
  return records;
}

std::vector<LatticeSample> run_lattice_samples(const RunConfig& config) {
  if (config.source != RunConfig::Source::lattice) throw PreconditionError("run_lattice_samples needs a lattice config");
  std::vector<LatticeSample> out(config.trials);
  const auto n = static_cast<std::int64_t>(config.trials);
  TorusOptions opts;
  opts.max_evaluations = config.max_evaluations;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t t = 0; t < n; ++t) {
    LatticeSample& s = out[t];
    s.trial = static_cast<std::uint64_t>(t);
    s.seed = derive_seed(config.seed, s.trial);
    std::mt19937_64 rng(s.seed);
    const RescaledLattice L = sample_haar_proxy(config.k, config.lattice_q, rng);
    Enclosure e;
    try {
      e = torus_diameter_l1(L, config.eps, opts);
    } catch (const BudgetError& b) {
      e = b.best();
    }
    std::ostringstream d;
    d << "basis:";
    for (int i = 0; i < L.k(); ++i)
      for (int j = 0; j < L.k(); ++j) d << (i || j ? "," : "") << L.integer_basis()[i][j];
    s.descriptor = d.str();
    s.lo = e.lo;
    s.hi = e.hi;
  }
  return out;
}

std::vector<double> rescaled_samples(const RunConfig& config) {
  std::vector<double> v;
  if (config.source == RunConfig::Source::lattice) {
    for (const auto& s : run_lattice_samples(config)) v.push_back(s.value());
  } else {
    for (const auto& r : run_trials(config))
      if (r.ok()) v.push_back(r.x);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Comparison

CompareReport compare_samples(std::vector<double> a, std::vector<double> b) {
  CompareReport rep{EmpiricalDistribution(std::move(a)), EmpiricalDistribution(std::move(b))};
  rep.ks = ks_distance(rep.a, rep.b);
  for (std::size_t i = 0; i < CompareReport::kLevels.size(); ++i) {
    rep.quantiles_a[i] = rep.a.quantile(CompareReport::kLevels[i]);
    rep.quantiles_b[i] = rep.b.quantile(CompareReport::kLevels[i]);
  }
  return rep;
}

CompareReport compare_experiment(const RunConfig& a, const RunConfig& b) {
  return compare_samples(rescaled_samples(a), rescaled_samples(b));
}

std::string CompareReport::summary() const {
  std::ostringstream os;
  os << "count_a\t" << a.count() << "\ncount_b\t" << b.count() << "\nks\t" << fmt_double(ks) << "\n";
  for (std::size_t i = 0; i < kLevels.size(); ++i)
    os << "q" << static_cast<int>(kLevels[i] * 100) << "\t" << fmt_double(quantiles_a[i]) << "\t"
       << fmt_double(quantiles_b[i]) << "\n";
  return os.str();
}

void CompareReport::write_cdf_tsv(const EmpiricalDistribution& d, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ResourceError("cannot write " + path.string());
  os << "value\tcdf\n";
  for (const auto& [v, f] : d.cdf_table()) os << fmt_double(v) << "\t" << fmt_double(f) << "\n";
}

// ---------------------------------------------------------------------------
// Filtration scaling

ScalingConfig ScalingConfig::parse(std::string_view text) {
  ScalingConfig c;
  for (const auto& [key, v] : parse_kv(text)) {
    if (key == "d") {
      c.d = static_cast<int>(to_u64(key, v));
    } else if (key == "k") {
      c.k = static_cast<int>(to_u64(key, v));
    } else if (key == "qs") {
      c.qs.clear();
      std::stringstream ss(v);
      for (std::string tok; std::getline(ss, tok, ',');) c.qs.push_back(static_cast<std::int64_t>(to_u64(key, std::string(trim(tok)))));
    } else if (key == "trials") {
      c.trials = to_u64(key, v);
    } else if (key == "mode") {
      c.mode = parse_sampling_mode(v);
    } else if (key == "seed") {
      c.seed = to_u64(key, v);
    } else if (key == "memory_cap") {
      c.memory_cap = to_u64(key, v);
    } else {
      throw PreconditionError("unknown scaling config key '" + key + "'");
    }
  }
  return c;
}

std::string ScalingTable::to_tsv() const {
  std::ostringstream os;
  os << "q\ti\tmean_diam\tmax_diam\tmean_ratio\tmax_ratio\n";
  for (const auto& r : rows)
    os << r.q << "\t" << r.i << "\t" << fmt_double(r.mean_diam) << "\t" << r.max_diam << "\t"
       << fmt_double(r.mean_ratio) << "\t" << fmt_double(r.max_ratio) << "\n";
  os << "# slope of log mean diam(G^(i),S) vs log q\n";
  for (const auto& [i, s] : slopes) os << "# i=" << i << "\t" << fmt_double(s) << "\n";
  return os.str();
}

ScalingTable filtration_scaling_experiment(const ScalingConfig& config) {
  if (config.d < 2) throw PreconditionError("scaling experiment needs d >= 2");
  ScalingTable table;
  const int c = config.d - 1;
  for (std::int64_t q : config.qs) {
    const GroupSpec spec = GroupSpec::unitriangular(q, config.d);
    std::vector<std::vector<std::uint32_t>> per_i(c + 2);
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      std::mt19937_64 rng(derive_seed(config.seed ^ static_cast<std::uint64_t>(q), t));
      const GeneratingSet gens = sample_generating_set(spec, config.k, config.mode, rng);
      BfsOptions opts;
      opts.memory_cap_bytes = config.memory_cap;
      const DistanceMap dm = bfs_distance_map(spec, gens, opts);
      for (int i = 1; i <= c + 1; ++i) per_i[i].push_back(subgroup_diameter(dm, i));
    }
    for (int i = 1; i <= c + 1; ++i) {
      ScalingRow row;
      row.q = q;
      row.i = i;
      const double scale = std::pow(static_cast<double>(q), static_cast<double>(config.d - 1) / (i * config.k));
      double sum = 0, ratio_sum = 0;
      for (auto v : per_i[i]) {
        sum += v;
        ratio_sum += v / scale;
        row.max_diam = std::max(row.max_diam, v);
        row.max_ratio = std::max(row.max_ratio, v / scale);
      }
      const auto n = static_cast<double>(std::max<std::size_t>(per_i[i].size(), 1));
      row.mean_diam = sum / n;
      row.mean_ratio = ratio_sum / n;
      table.rows.push_back(row);
    }
  }
  for (int i = 1; i <= c + 1; ++i) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    bool usable = true;
    for (const auto& r : table.rows) {
      if (r.i != i) continue;
      if (r.mean_diam <= 0) usable = false;
      const double x = std::log(static_cast<double>(r.q)), y = usable ? std::log(r.mean_diam) : 0;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    const double denom = n * sxx - sx * sx;
    table.slopes.emplace_back(i, usable && n >= 2 && denom != 0 ? (n * sxy - sx * sy) / denom : std::nan(""));
  }
  return table;
}

}  // namespace nilcayley
