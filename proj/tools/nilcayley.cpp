#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nilcayley/cayley.hpp"
#include "nilcayley/distortion.hpp"
#include "nilcayley/errors.hpp"
#include "nilcayley/group.hpp"
#include "nilcayley/harness.hpp"
#include "nilcayley/lattice.hpp"
#include "nilcayley/rng.hpp"

using namespace nilcayley;

namespace {

// "1,0,0" is an entry vector; "#17" is a raw code.
Code parse_element(const GroupSpec& spec, const std::string& text) {
  if (!text.empty() && text[0] == '#') {
    Code c = 0;
    try {
      c = std::stoull(text.substr(1));
    } catch (const std::exception&) {
      throw PreconditionError("bad element code '" + text + "'");
    }
    require_element(spec, c);
    return c;
  }
  Entries e{};
  std::stringstream ss(text);
  int n = 0;
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (n >= spec.entry_count()) throw PreconditionError("too many entries in '" + text + "'");
    try {
      e[n] = std::stoll(tok);
    } catch (const std::exception&) {
      throw PreconditionError("bad entry '" + tok + "' in '" + text + "'");
    }
    const auto r = spec.radix(n);
    e[n] = ((e[n] % r) + r) % r;
    ++n;
  }
  if (n != spec.entry_count())
    throw PreconditionError("element '" + text + "' needs " + std::to_string(spec.entry_count()) + " entries");
  return spec.encode(e);
}

std::string format_element(const GroupSpec& spec, Code c) {
  const Entries e = spec.decode(c);
  std::string out;
  for (int i = 0; i < spec.entry_count(); ++i) out += (i ? "," : "") + std::to_string(e[i]);
  return out;
}

struct GroupArgs {
  std::string spec = "ut:5,3";
  std::vector<std::string> gens;
  int random_k = 0;
  std::uint64_t seed = 1;
  std::string mode = "iid-generators";
  std::uint64_t memory_cap = std::uint64_t{4} << 30;

  void attach(CLI::App* app) {
    app->add_option("-g,--group", spec, "ut:q,d or abelian:m1,m2,...")->capture_default_str();
    app->add_option("-s,--gen", gens, "generator as comma-separated entries, or #code");
    app->add_option("--random", random_k, "draw k random generators instead");
    app->add_option("--seed", seed, "seed for --random")->capture_default_str();
    app->add_option("--mode", mode, "iid-generators or uniform-symmetric-subset")->capture_default_str();
    app->add_option("--memory-cap", memory_cap, "BFS memory cap in bytes")->capture_default_str();
  }

  std::pair<GroupSpec, GeneratingSet> resolve() const {
    const GroupSpec g = GroupSpec::parse(spec);
    if (random_k > 0) {
      if (!gens.empty()) throw PreconditionError("--gen and --random are exclusive");
      std::mt19937_64 rng(seed);
      return {g, sample_generating_set(g, random_k, parse_sampling_mode(mode), rng)};
    }
    if (gens.empty()) throw PreconditionError("give generators with --gen or --random");
    std::vector<Code> codes;
    for (const auto& s : gens) codes.push_back(parse_element(g, s));
    return {g, GeneratingSet(g, codes)};
  }

  BfsOptions options() const {
    BfsOptions o;
    o.memory_cap_bytes = memory_cap;
    return o;
  }
};

void print_generators(const GroupSpec& spec, const GeneratingSet& gens) {
  for (int j = 0; j < gens.k(); ++j)
    std::cout << "z" << j << "\t" << format_element(spec, gens.positives()[j]) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* t = std::getenv("NILCAYLEY_THREADS")) {
    const int n = std::atoi(t);
    if (n <= 0) {
      std::cerr << "error: NILCAYLEY_THREADS must be a positive integer\n";
      return static_cast<int>(ExitCode::precondition);
    }
    omp_set_num_threads(n);
  }

  CLI::App app{"Cayley graph diameters of finite nilpotent groups"};
  app.require_subcommand(1);

  GroupArgs diam_args;
  std::string dump_path;
  auto* diam = app.add_subcommand("diam", "diameter of one Cayley graph");
  diam_args.attach(diam);
  diam->add_option("--dump", dump_path, "write the distance map here");

  GroupArgs filt_args;
  auto* filt = app.add_subcommand("filtration", "diameters along the lower central series");
  filt_args.attach(filt);

  GroupArgs synth_args;
  std::string target_text;
  auto* synth = app.add_subcommand("synth", "word for a target element");
  synth_args.attach(synth);
  synth->add_option("-t,--target", target_text, "target element")->required();

  std::string lattice_desc;
  double lattice_eps = 1e-2;
  std::uint64_t lattice_evals = 4'000'000;
  auto* lat = app.add_subcommand("lattice", "torus diameter of a congruence lattice");
  lat->add_option("descriptor", lattice_desc, "lat:k=K;mod=m1,..;g=residues")->required();
  lat->add_option("--eps", lattice_eps, "target enclosure width")->capture_default_str();
  lat->add_option("--max-evaluations", lattice_evals)->capture_default_str();

  std::string mc_config, mc_out, mc_csv;
  auto* mc = app.add_subcommand("montecarlo", "run trials from a config file");
  mc->add_option("config", mc_config)->required()->check(CLI::ExistingFile);
  mc->add_option("-o,--out", mc_out, "JSONL output (default stdout)");
  mc->add_option("--csv", mc_csv, "CSV summary path");

  std::string cmp_a, cmp_b, cmp_prefix;
  auto* cmp = app.add_subcommand("compare", "KS distance between two experiments");
  cmp->add_option("config_a", cmp_a)->required()->check(CLI::ExistingFile);
  cmp->add_option("config_b", cmp_b)->required()->check(CLI::ExistingFile);
  cmp->add_option("--cdf-prefix", cmp_prefix, "write <prefix>_a.tsv and <prefix>_b.tsv");

  std::string scaling_config;
  auto* scaling = app.add_subcommand("scaling", "diameters of every G^(i) over a q grid");
  scaling->add_option("config", scaling_config)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*diam) {
      const auto [spec, gens] = diam_args.resolve();
      print_generators(spec, gens);
      if (!dump_path.empty()) {
        const DistanceMap dm = bfs_distance_map(spec, gens, diam_args.options());
        dm.save(dump_path);
        std::cout << "diam\t" << diameter(dm) << "\n";
      } else {
        const double t0 = omp_get_wtime();
        const BfsSummary s = bfs_eccentricity(spec, gens, diam_args.options());
        const double dt = omp_get_wtime() - t0;
        if (!s.complete(spec)) throw NotGeneratingError("generators reach only " + std::to_string(s.reached) + " elements");
        std::cout << "diam\t" << s.eccentricity << "\n";
        std::cerr << "relaxations/s\t" << static_cast<double>(s.relaxations) / dt << "\n";
      }
    } else if (*filt) {
      const auto [spec, gens] = filt_args.resolve();
      print_generators(spec, gens);
      const FiltrationReport r = filtration_report(spec, gens, filt_args.options());
      std::cout << "diam\t" << r.diam << "\ndiam_ab\t" << r.diam_ab << "\ni\tsubgroup\tquotient\n";
      for (const auto& row : r.rows) std::cout << row.i << "\t" << row.subgroup << "\t" << row.quotient << "\n";
      std::cout << "sandwich\t" << (r.sandwich_holds() ? "ok" : "VIOLATED") << "\ntelescoping\t"
                << (r.telescoping_holds() ? "ok" : "VIOLATED") << "\n";
    } else if (*synth) {
      const auto [spec, gens] = synth_args.resolve();
      const Code target = parse_element(spec, target_text);
      const DistanceMap ab_map = bfs_distance_map(spec.abelianisation(), gens.abelianised(spec), synth_args.options());
      const Synthesis s = full_synthesize(spec, gens, target, ab_map);
      std::cout << s.word.to_string() << "\n";
      std::cerr << "length\t" << s.word.length() << "\ndiam_ab\t" << s.diam_ab << "\nvalue\t"
                << format_element(spec, word_eval(spec, gens, s.word)) << "\n";
    } else if (*lat) {
      const IntegerLattice L = IntegerLattice::parse(lattice_desc);
      TorusOptions opts;
      opts.max_evaluations = lattice_evals;
      Enclosure e;
      int code = 0;
      try {
        e = torus_diameter_l1(rescale(L), lattice_eps, opts);
      } catch (const BudgetError& b) {
        e = b.best();
        std::cerr << "error: " << b.what() << "\n";
        code = static_cast<int>(ExitCode::resource);
      }
      std::cout.precision(12);
      std::cout << "lo\t" << e.lo << "\nhi\t" << e.hi << "\nevaluations\t" << e.evaluations << "\n";
      return code;
    } else if (*mc) {
      const RunConfig config = RunConfig::load(mc_config);
      std::ofstream file;
      if (!mc_out.empty()) {
        file.open(mc_out);
        if (!file) throw ResourceError("cannot write " + mc_out);
      }
      std::ostream& out = mc_out.empty() ? std::cout : file;
      if (config.source == RunConfig::Source::lattice) {
        for (const auto& s : run_lattice_samples(config))
          out << nlohmann::ordered_json{{"trial", s.trial}, {"seed", s.seed}, {"lattice", s.descriptor},
                                        {"lo", s.lo}, {"hi", s.hi}}
                     .dump()
              << "\n";
      } else {
        const auto records = run_trials(config, [&](const TrialRecord& r) {
          out << r.to_jsonl() << "\n";
          out.flush();
          std::cerr << "trial " << r.trial << "\t" << r.wall_seconds << " s\n";
        });
        if (!mc_csv.empty()) {
          std::ofstream csv(mc_csv);
          if (!csv) throw ResourceError("cannot write " + mc_csv);
          csv << "trial,seed,diam,diam_ab,X,X_ab,eps,exit_code\n";
          csv.precision(17);
          for (const auto& r : records)
            csv << r.trial << "," << r.seed << "," << r.diam << "," << r.diam_ab << "," << r.x << "," << r.x_ab
                << "," << r.eps << "," << r.exit_code << "\n";
        }
      }
    } else if (*cmp) {
      const CompareReport rep = compare_experiment(RunConfig::load(cmp_a), RunConfig::load(cmp_b));
      std::cout << rep.summary();
      if (!cmp_prefix.empty()) {
        CompareReport::write_cdf_tsv(rep.a, cmp_prefix + "_a.tsv");
        CompareReport::write_cdf_tsv(rep.b, cmp_prefix + "_b.tsv");
      }
    } else if (*scaling) {
      std::ifstream is(scaling_config);
      std::stringstream ss;
      ss << is.rdbuf();
      std::cout << filtration_scaling_experiment(ScalingConfig::parse(ss.str())).to_tsv();
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return static_cast<int>(ExitCode::resource);
  }
  return 0;
}
