#include <algorithm>

#include "nilcayley/cayley.hpp"
#include "nilcayley/errors.hpp"

namespace nilcayley {

std::uint32_t diameter(const DistanceMap& dm) {
  std::uint32_t best = 0;
  for (Code g = 0; g < dm.size(); ++g) {
    const auto d = dm[g];
    if (d == DistanceMap::kUnreached)
      throw NotGeneratingError("generating set does not generate " + dm.spec().descriptor());
    best = std::max(best, d);
  }
  return best;
}

std::uint32_t subgroup_diameter(const DistanceMap& dm, int i) {
  const GroupSpec& spec = dm.spec();
  if (i < 1 || i > spec.nilpotency_class() + 1) throw PreconditionError("subgroup index out of range");
  std::uint32_t best = 0;
  const Code n = spec.subgroup_order(i);  // G^(i) is the code prefix [0, n)
  for (Code g = 0; g < n; ++g) {
    const auto d = dm[g];
    if (d == DistanceMap::kUnreached) throw NotGeneratingError("distance map is incomplete");
    best = std::max(best, d);
  }
  return best;
}

std::uint32_t coset_diameter(const DistanceMap& dm, const std::function<bool(Code)>& in_h,
                             const std::function<Code(Code)>& key, Code keys) {
  std::vector<std::uint32_t> nearest(keys, DistanceMap::kUnreached);
  for (Code g = 0; g < dm.size(); ++g) {
    if (!in_h(g)) continue;
    auto& slot = nearest[key(g)];
    slot = std::min(slot, dm[g]);
  }
  std::uint32_t best = 0;
  for (auto d : nearest) {
    if (d == DistanceMap::kUnreached) throw NotGeneratingError("some coset is unreached");
    best = std::max(best, d);
  }
  return best;
}

std::uint32_t quotient_diameter(const DistanceMap& dm, int i) {
  const GroupSpec& spec = dm.spec();
  if (i < 1 || i > spec.nilpotency_class() + 1) throw PreconditionError("quotient index out of range");
  const Code members = spec.subgroup_order(i);
  const Code stride = spec.subgroup_order(i + 1);
  std::vector<std::uint32_t> nearest(members / stride, DistanceMap::kUnreached);
  for (Code g = 0; g < members; ++g) {
    auto& slot = nearest[g / stride];
    slot = std::min(slot, dm[g]);
  }
  std::uint32_t best = 0;
  for (auto d : nearest) {
    if (d == DistanceMap::kUnreached) throw NotGeneratingError("distance map is incomplete");
    best = std::max(best, d);
  }
  return best;
}

Word shortest_word(const DistanceMap& dm, Code target) {
  const GroupSpec& spec = dm.spec();
  require_element(spec, target);
  if (dm[target] == DistanceMap::kUnreached) throw NotGeneratingError("target is unreachable");
  const auto& S = dm.gens().symmetric();
  std::vector<Entries> inverse;
  for (Code s : S) {
    Entries out{};
    spec.inv_entries(spec.decode(s), out);
    inverse.push_back(out);
  }
  Word w;
  Code g = target;
  Entries cur = spec.decode(g), prev{};
  while (dm[g] > 0) {
    const auto d = dm[g];
    bool stepped = false;
    for (std::size_t j = 0; j < S.size(); ++j) {
      spec.mul_entries(inverse[j], cur, prev);
      const Code h = spec.encode(prev);
      if (dm[h] + 1 == d) {
        w.push_back(dm.gens().letters()[j]);  // g = s_j h
        g = h;
        cur = prev;
        stepped = true;
        break;
      }
    }
    if (!stepped) throw PreconditionError("distance map is inconsistent at " + std::to_string(g));
  }
  return w;
}

std::uint32_t max_neighbor_gap(const DistanceMap& dm) {
  const GroupSpec& spec = dm.spec();
  std::vector<Entries> gens;
  for (Code s : dm.gens().symmetric()) gens.push_back(spec.decode(s));
  std::uint32_t gap = 0;
  Entries out{};
  for (Code g = 0; g < dm.size(); ++g) {
    const Entries v = spec.decode(g);
    const auto d = dm[g];
    for (const auto& s : gens) {
      spec.mul_entries(s, v, out);
      const auto e = dm[spec.encode(out)];
      gap = std::max(gap, d > e ? d - e : e - d);
    }
  }
  return gap;
}

bool FiltrationReport::sandwich_holds() const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto next = r + 1 < rows.size() ? rows[r + 1].subgroup : 0u;
    if (rows[r].quotient > rows[r].subgroup) return false;
    if (rows[r].subgroup > rows[r].quotient + next) return false;
  }
  return true;
}

bool FiltrationReport::telescoping_holds() const {
  std::uint64_t sum = 0;
  for (const auto& r : rows) sum += r.quotient;
  return diam <= sum;
}

FiltrationReport filtration_report(const DistanceMap& dm, const DistanceMap& ab_map) {
  FiltrationReport rep;
  rep.diam = diameter(dm);
  rep.diam_ab = diameter(ab_map);
  for (int i = 1; i <= dm.spec().nilpotency_class(); ++i)
    rep.rows.push_back({i, subgroup_diameter(dm, i), quotient_diameter(dm, i)});
  return rep;
}

FiltrationReport filtration_report(const GroupSpec& spec, const GeneratingSet& gens, const BfsOptions& opts) {
  const DistanceMap dm = bfs_distance_map(spec, gens, opts);
  const DistanceMap ab = bfs_distance_map(spec.abelianisation(), gens.abelianised(spec), opts);
  return filtration_report(dm, ab);
}

}  // namespace nilcayley
