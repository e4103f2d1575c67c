#include <vector>

#include "nilcayley/cayley.hpp"
#include "nilcayley/errors.hpp"

namespace nilcayley {

namespace {

struct CellOverflow {};

void run(DistanceMap& dm) {
  const GroupSpec& spec = dm.spec();
  const auto& S = dm.gens().symmetric();
  std::vector<Entries> gens;
  for (Code s : S) gens.push_back(spec.decode(s));

  std::vector<std::uint64_t> visited((spec.order() + 63) / 64, 0);
  std::vector<Code> frontier{0}, next;
  visited[0] |= 1;
  dm.set(0, 0);

  Entries out{};
  for (std::uint32_t level = 1; !frontier.empty(); ++level) {
    next.clear();
    for (Code g : frontier) {
      const Entries v = spec.decode(g);
      for (const auto& s : gens) {
        spec.mul_entries(s, v, out);  // edge g -> s g
        const Code h = spec.encode(out);
        std::uint64_t& word = visited[h >> 6];
        const std::uint64_t bit = std::uint64_t{1} << (h & 63);
        if (word & bit) continue;
        word |= bit;
        if (level > dm.max_storable()) throw CellOverflow{};
        dm.set(h, level);
        next.push_back(h);
      }
    }
    frontier.swap(next);
  }
}

}  // namespace

DistanceMap bfs_reference(const GroupSpec& spec, const GeneratingSet& gens, const BfsOptions& opts) {
  if (gens.symmetric().empty()) throw PreconditionError("generating set has no non-identity element");
  for (int width = opts.initial_cell_width ? opts.initial_cell_width : 1; width <= 4; width *= 2) {
    const std::uint64_t bytes = spec.order() * (width + 8) + spec.order() / 8;
    if (bytes > opts.memory_cap_bytes)
      throw ResourceError("reference BFS on " + spec.descriptor() + " needs " + std::to_string(bytes) +
                          " bytes, above the cap");
    DistanceMap dm(spec, gens, width);
    try {
      run(dm);
      return dm;
    } catch (const CellOverflow&) {
    }
  }
  throw ResourceError("distance exceeds 32-bit cells");
}

}  // namespace nilcayley
