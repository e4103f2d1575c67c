// One PASS/FAIL line per acceptance criterion. Pass criterion numbers as
// arguments to run a subset; exit status is 1 if any selected criterion fails.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "nilcayley/cayley.hpp"
#include "nilcayley/distortion.hpp"
#include "nilcayley/errors.hpp"
#include "nilcayley/group.hpp"
#include "nilcayley/harness.hpp"
#include "nilcayley/intlinalg.hpp"
#include "nilcayley/lattice.hpp"
#include "nilcayley/rng.hpp"
#include "nilcayley/stats.hpp"

using namespace nilcayley;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<bool> closure(const GroupSpec& spec, const std::vector<Code>& gens) {
  std::vector<bool> seen(spec.order(), false);
  std::queue<Code> todo;
  seen[0] = true;
  todo.push(0);
  while (!todo.empty()) {
    const Code g = todo.front();
    todo.pop();
    for (Code s : gens) {
      const Code h = mul(spec, g, s);
      if (!seen[h]) {
        seen[h] = true;
        todo.push(h);
      }
    }
  }
  return seen;
}

// ---------------------------------------------------------------------------

Outcome exact_algebra() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  long failures = 0, checks = 0;
  for (std::int64_t q : {3, 5}) {
    const auto h = GroupSpec::unitriangular(q, 4);
    for (int t = 0; t < 10'000; ++t) {
      const Code x = uniform_below(rng, h.order()), y = uniform_below(rng, h.order()),
                 z = uniform_below(rng, h.order());
      const Code lhs = commutator(h, x, mul(h, z, y));
      const Code rhs = mul(h, mul(h, commutator(h, x, z), commutator(h, x, y)),
                           inv(h, commutator(h, z, commutator(h, y, x))));
      failures += lhs != rhs;
      failures += inv(h, commutator(h, x, y)) != commutator(h, y, x);
      checks += 2;
    }
  }
  const double dt = seconds_since(t0);
  return {failures == 0 && dt < 10,
          std::to_string(checks) + " identity checks, " + std::to_string(failures) + " failures, " + fmt("%.2f s", dt)};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::vector<GroupSpec> specs;
  for (std::int64_t q : {2, 3})
    for (int d : {3, 4}) specs.push_back(GroupSpec::unitriangular(q, d));
  for (std::int64_t m : {2, 3, 4, 12, 97, 210, 1024, 9973, 10000}) specs.push_back(GroupSpec::abelian({m}));
  for (auto moduli : std::vector<std::vector<std::int64_t>>{{2, 2},
                                                            {2, 4},
                                                            {6, 4},
                                                            {3, 9, 27},
                                                            {2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2},
                                                            {4, 6, 10},
                                                            {12, 30},
                                                            {7, 11, 13},
                                                            {10, 10, 10, 10},
                                                            {100, 100},
                                                            {2, 4, 8, 16},
                                                            {5, 5, 5, 5, 5}})
    specs.push_back(GroupSpec::abelian(moduli));

  std::mt19937_64 rng(202);
  long lcs_disagreements = 0, gen_disagreements = 0, gen_checks = 0, lcs_checks = 0;
  for (const auto& spec : specs) {
    // lower central series by brute-force commutator closure
    std::vector<bool> term(spec.order(), true);
    for (int i = 1; i <= spec.nilpotency_class() + 1; ++i) {
      for (Code g = 0; g < spec.order(); ++g) lcs_disagreements += lcs_member(spec, i, g) != term[g];
      lcs_checks += static_cast<long>(spec.order());
      std::set<Code> comms;
      if (spec.is_unitriangular()) {
        for (Code g = 0; g < spec.order(); ++g)
          for (Code h = 0; h < spec.order(); ++h)
            if (term[h]) comms.insert(commutator(spec, g, h));
      } else {
        // abelian: still evaluate every commutator against a random sample of pairs
        for (int t = 0; t < 20'000; ++t)
          comms.insert(commutator(spec, uniform_below(rng, spec.order()), uniform_below(rng, spec.order())));
      }
      term = closure(spec, {comms.begin(), comms.end()});
    }
    // generation: every single element, then pairs (all of them on small groups)
    auto check = [&](const std::vector<Code>& gens) {
      const auto seen = closure(spec, gens);
      const bool all = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
      gen_disagreements += generates(spec, gens) != all;
      ++gen_checks;
    };
    const bool small = spec.order() <= 64;
    const Code singles = spec.order() <= 1024 ? spec.order() : 300;
    for (Code a = 0; a < singles; ++a) check({singles == spec.order() ? a : uniform_below(rng, spec.order())});
    if (small) {
      for (Code a = 0; a < spec.order(); ++a)
        for (Code b = a; b < spec.order(); ++b) check({a, b});
    } else {
      const int pairs = spec.order() <= 1024 ? 2000 : 200;
      for (int t = 0; t < pairs; ++t) check({uniform_below(rng, spec.order()), uniform_below(rng, spec.order())});
      for (int t = 0; t < pairs / 4; ++t)
        check({uniform_below(rng, spec.order()), uniform_below(rng, spec.order()), uniform_below(rng, spec.order())});
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << specs.size() << " specs, " << lcs_checks << " lcs_member checks (" << lcs_disagreements << " disagreements), "
     << gen_checks << " generates checks (" << gen_disagreements << " disagreements), " << fmt("%.1f s", dt);
  return {lcs_disagreements == 0 && gen_disagreements == 0 && dt < 120, os.str()};
}

Outcome sandwich() {
  std::vector<GroupSpec> specs;
  for (std::int64_t q : {3, 5, 7, 11, 13, 17, 21}) specs.push_back(GroupSpec::unitriangular(q, 3));
  for (std::int64_t q : {2, 3, 4, 5, 9}) specs.push_back(GroupSpec::unitriangular(q, 4));
  specs.push_back(GroupSpec::unitriangular(2, 5));
  specs.push_back(GroupSpec::abelian({10, 10, 10}));
  specs.push_back(GroupSpec::abelian({4, 25}));
  std::mt19937_64 rng(303);
  long violations = 0, rows = 0;
  for (int t = 0; t < 200; ++t) {
    const auto& spec = specs[t % specs.size()];
    const int k = spec.rank() + static_cast<int>(rng() % 3);
    const auto mode = t % 2 ? SamplingMode::uniform_symmetric_subset : SamplingMode::iid_generators;
    const auto gens = sample_generating_set(spec, k, mode, rng);
    const auto r = filtration_report(spec, gens);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const auto next = i + 1 < r.rows.size() ? r.rows[i + 1].subgroup : 0;
      violations += !(r.rows[i].quotient <= r.rows[i].subgroup && r.rows[i].subgroup <= r.rows[i].quotient + next);
      ++rows;
    }
  }
  return {violations == 0, "200 instances, " + std::to_string(rows) + " layer rows, " + std::to_string(violations) +
                               " violations"};
}

Outcome power_decomposition() {
  const auto t0 = Clock::now();
  long failures = 0;
  std::ostringstream os;
  failures += n_required(2) != 2;
  failures += n_required(3) != 3;
  for (int i = 1; i <= 4; ++i) {
    const double bound = remainder_constant(i);
    double worst = 0;
    for (std::int64_t lambda = 0; lambda <= 1'000'000; ++lambda) {
      const auto d = power_decompose(lambda, i);
      std::int64_t sum = d.remainder;
      for (auto a : d.parts) {
        std::int64_t p = 1;
        for (int e = 0; e < i; ++e) p *= a;
        sum += p;
      }
      failures += sum != lambda;
      failures += static_cast<int>(d.parts.size()) != n_required(i);
      if (lambda > 0) {
        const double ratio = d.remainder / std::pow(static_cast<double>(lambda), 1.0 / i);
        worst = std::max(worst, ratio);
        failures += ratio > bound;
      }
    }
    os << "i=" << i << " sup r/lambda^(1/i)=" << fmt("%.3f", worst) << " (bound " << fmt("%.1f", bound) << "); ";
  }
  const double dt = seconds_since(t0);
  os << failures << " failures, " << fmt("%.1f s", dt);
  return {failures == 0 && dt < 60, os.str()};
}

Outcome constructive_synthesis() {
  const auto t0 = Clock::now();
  long failures = 0;
  std::mt19937_64 rng(404);
  const auto ab_map_of = [](const GroupSpec& spec, const GeneratingSet& gens) {
    return bfs_distance_map(spec.abelianisation(), gens.abelianised(spec));
  };
  const auto h5 = GroupSpec::unitriangular(5, 3);
  for (int t = 0; t < 20; ++t) {
    const auto gens = sample_generating_set(h5, 3, SamplingMode::iid_generators, rng);
    const auto ab = ab_map_of(h5, gens);
    for (Code target = 0; target < h5.order(); ++target)
      failures += word_eval(h5, gens, full_synthesize(h5, gens, target, ab).word) != target;
  }
  const auto h101 = GroupSpec::unitriangular(101, 3);
  {
    const auto gens = sample_generating_set(h101, 3, SamplingMode::iid_generators, rng);
    const auto ab = ab_map_of(h101, gens);
    for (int n = 0; n < 1000; ++n) {
      const Code target = uniform_below(rng, h101.order());
      failures += word_eval(h101, gens, full_synthesize(h101, gens, target, ab).word) != target;
    }
  }
  // per generating set: max over targets of (length - diam_ab) / sqrt(diam_ab)
  std::ostringstream os;
  std::vector<double> means;
  bool finite = true;
  for (std::int64_t q : {31, 101, 499}) {
    const auto h = GroupSpec::unitriangular(q, 3);
    double sum = 0, worst = 0;
    const int sets = 10;
    for (int t = 0; t < sets; ++t) {
      const auto gens = sample_generating_set(h, 3, SamplingMode::iid_generators, rng);
      const auto ab = ab_map_of(h, gens);
      double m = -1e300;
      for (int n = 0; n < 300; ++n) {
        const Code target = uniform_below(rng, h.order());
        const auto s = full_synthesize(h, gens, target, ab);
        failures += word_eval(h, gens, s.word) != target;
        const double ratio = (static_cast<double>(s.word.length()) - s.diam_ab) / std::sqrt(static_cast<double>(s.diam_ab));
        m = std::max(m, ratio);
      }
      finite = finite && std::isfinite(m);
      sum += m;
      worst = std::max(worst, m);
    }
    means.push_back(sum / sets);
    os << "q=" << q << " mean max ratio " << fmt("%.3f", means.back()) << " (max " << fmt("%.3f", worst) << "); ";
  }
  const bool non_increasing = means[1] <= means[0] && means[2] <= means[1];
  const double dt = seconds_since(t0);
  os << failures << " wrong words, " << fmt("%.1f s", dt);
  return {failures == 0 && finite && non_increasing && dt < 300, os.str()};
}

Outcome distributional_collapse() {
  const auto t0 = Clock::now();
  const auto hc = RunConfig::parse("spec=ut:199,3\nk=3\ntrials=500\nseed=606\n");
  const auto ac = RunConfig::parse("spec=abelian:199,199\nk=3\ntrials=500\nseed=607\n");
  const auto hr = run_trials(hc);
  const auto ar = run_trials(ac);
  long violations = 0, errors = 0;
  std::vector<double> hx, ax;
  for (const auto& r : hr) {
    if (!r.ok()) {
      ++errors;
      continue;
    }
    violations += r.diam_ab > r.diam;
    hx.push_back(r.x);
  }
  for (const auto& r : ar) {
    if (!r.ok()) {
      ++errors;
      continue;
    }
    ax.push_back(r.x);
  }
  const auto rep = compare_samples(hx, ax);
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << "KS=" << fmt("%.4f", rep.ks) << " (limit 0.1), " << violations << " diam_ab > diam violations, " << errors
     << " trial errors, " << fmt("%.1f s", dt);
  return {violations == 0 && errors == 0 && rep.ks <= 0.1, os.str()};
}

Outcome lattice_duality() {
  std::mt19937_64 rng(707);
  int mismatches = 0, instances = 0;
  while (instances < 50) {
    const int k = 1 + static_cast<int>(rng() % 5);
    const int r = 1 + static_cast<int>(rng() % 2);
    std::vector<std::int64_t> moduli;
    std::vector<std::vector<std::int64_t>> g(r, std::vector<std::int64_t>(k));
    std::int64_t product = 1;
    for (int t = 0; t < r; ++t) {
      moduli.push_back(2 + static_cast<std::int64_t>(uniform_below(rng, r == 1 ? 9999 : 99)));
      product *= moduli.back();
      for (auto& v : g[t]) v = static_cast<std::int64_t>(uniform_below(rng, moduli[t]));
    }
    if (product > 10'000) continue;
    try {
      const auto L = lattice_from_generators(moduli, g);
      const auto spec = GroupSpec::abelian(moduli);
      std::vector<Code> gens;
      for (int j = 0; j < k; ++j) {
        Entries e{};
        for (int t = 0; t < r; ++t) e[t] = g[t][j];
        gens.push_back(spec.encode(e));
      }
      mismatches += coset_diameter_exact(L) != diameter(bfs_distance_map(spec, GeneratingSet(spec, gens)));
      ++instances;
    } catch (const NotGeneratingError&) {
    }
  }
  std::ostringstream os;
  os << instances << " duality instances, " << mismatches << " mismatches; ";
  bool enclosures = true;
  for (int k = 2; k <= 4; ++k) {
    const auto e = torus_diameter_l1(RescaledLattice::from_integer_basis(intlinalg::identity(k)), 1e-2);
    enclosures = enclosures && e.contains(k / 2.0);
    os << "Z^" << k << " [" << fmt("%.4f", e.lo) << ", " << fmt("%.4f", e.hi) << "]; ";
  }
  intlinalg::Matrix d = intlinalg::zeros(2, 2);
  d[0][0] = 4;
  d[1][1] = 1;
  const auto e = torus_diameter_l1(RescaledLattice::from_integer_basis(d), 1e-2);
  enclosures = enclosures && e.contains(1.25);
  os << "diag(2,1/2) [" << fmt("%.4f", e.lo) << ", " << fmt("%.4f", e.hi) << "]";
  return {mismatches == 0 && enclosures, os.str()};
}

Outcome limit_model() {
  const auto t0 = Clock::now();
  const auto lat = RunConfig::parse("source=lattice\nk=4\ntrials=300\nseed=808\neps=0.01\nlattice_q=1000003\n");
  const auto lattice_values = rescaled_samples(lat);
  std::vector<double> ks;
  std::ostringstream os;
  for (std::int64_t q : {101, 499, 999}) {
    const auto gc = RunConfig::parse("spec=ut:" + std::to_string(q) + ",3\nk=4\ntrials=300\nseed=809\n");
    const auto rep = compare_samples(rescaled_samples(gc), lattice_values);
    ks.push_back(rep.ks);
    os << "q=" << q << " KS=" << fmt("%.4f", rep.ks) << " (medians " << fmt("%.3f", rep.quantiles_a[2]) << " vs "
       << fmt("%.3f", rep.quantiles_b[2]) << "); ";
  }
  int inversions = 0;
  bool small_inversions = true;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i)
    if (ks[i + 1] > ks[i]) {
      ++inversions;
      small_inversions = small_inversions && ks[i + 1] - ks[i] <= 0.02;
    }
  os << fmt("%.0f s", seconds_since(t0));
  return {inversions <= 1 && small_inversions && ks.back() <= 0.15, os.str()};
}

Outcome determinism_and_speed() {
  const auto c = RunConfig::parse("spec=ut:9,4\nk=4\ntrials=24\nseed=909\nlayers=on\n");
  const int saved = omp_get_max_threads();
  std::vector<std::string> outputs;
  for (int threads : {1, 2, 4, 8}) {
    omp_set_num_threads(threads);
    std::string out;
    run_trials(c, [&](const TrialRecord& r) { out += r.to_jsonl() + "\n"; });
    outputs.push_back(out);
  }
  omp_set_num_threads(saved);
  const bool identical = std::all_of(outputs.begin(), outputs.end(), [&](const auto& o) { return o == outputs[0]; });

  const auto h = GroupSpec::unitriangular(16, 4);
  std::mt19937_64 rng(910);
  const auto gens = sample_generating_set(h, 3, SamplingMode::iid_generators, rng);
  double best = 0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    const auto s = bfs_eccentricity(h, gens);
    best = std::max(best, static_cast<double>(s.relaxations) / seconds_since(t0));
  }
  std::ostringstream os;
  os << "JSONL " << (identical ? "identical" : "DIFFERS") << " across 1/2/4/8 threads; H_{16,4} BFS "
     << fmt("%.3g", best) << " relaxations/s with " << saved << " thread(s)";
  return {identical && best >= 1e7, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact algebra suite", exact_algebra},
      {"oracle equivalence", oracle_equivalence},
      {"filtration sandwich", sandwich},
      {"power decomposition", power_decomposition},
      {"constructive synthesis", constructive_synthesis},
      {"distributional collapse", distributional_collapse},
      {"lattice duality", lattice_duality},
      {"limit-model comparison", limit_model},
      {"determinism and performance", determinism_and_speed},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all_pass = true;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    const int id = static_cast<int>(n) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[n].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[n].first << "): " << o.detail
              << std::endl;
  }
  return all_pass ? 0 : 1;
}
