// Parallel BFS over Cayley graphs of the supported groups.
//
// The last entry of every spec (the (1,d) corner of H_{q,d}, the last cyclic
// factor of an abelian group) is central, and left multiplication by any s
// acts on it by a translation that depends only on the remaining entries:
//
//   s . (f, c) = (s . f, c + shift(s, f))   (mod m)
//
// So G splits into F = |G|/m fibers of m elements each, every fiber is stored
// as an m-bit cyclic bitset, and one BFS step along s is "rotate the source
// fiber by shift(s, f) and OR it into the target fiber". The level loop pulls
// into each target fiber from its |S| predecessors, so every fiber is written
// by exactly one thread and the result does not depend on the schedule.

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <optional>

#include "nilcayley/cayley.hpp"
#include "nilcayley/errors.hpp"

namespace nilcayley {

namespace {

using Word64 = std::uint64_t;

struct Pred {
  std::uint32_t src;    // source fiber
  std::uint32_t shift;  // rotation applied to the source bits
};

struct Layout {
  Code fibers = 0;
  std::uint64_t m = 0;   // fiber length in bits
  std::size_t words = 0; // 64-bit words per fiber
  Word64 top_mask = 0;   // valid bits of the last word
  std::size_t ns = 0;    // |S|
};

Layout make_layout(const GroupSpec& spec, const GeneratingSet& gens) {
  Layout l;
  l.m = static_cast<std::uint64_t>(spec.radix(spec.entry_count() - 1));
  l.fibers = spec.order() / l.m;
  l.words = (l.m + 63) / 64;
  const auto tail = l.m % 64;
  l.top_mask = tail ? (Word64{1} << tail) - 1 : ~Word64{0};
  l.ns = gens.symmetric().size();
  return l;
}

std::uint64_t memory_estimate(const Layout& l, int dist_width, Code order) {
  return l.fibers * l.ns * sizeof(Pred) + 3 * l.fibers * l.words * sizeof(Word64) + 3 * l.fibers +
         static_cast<std::uint64_t>(dist_width) * order;
}

// preds[f' * ns + j] describes the edge (s_j^-1 f', .) -> (f', .) for s_j in S.
std::vector<Pred> build_predecessors(const GroupSpec& spec, const GeneratingSet& gens, const Layout& l) {
  std::vector<Pred> preds(l.fibers * l.ns);
  std::vector<Entries> inverse;
  for (Code s : gens.symmetric()) {
    Entries out{};
    spec.inv_entries(spec.decode(s), out);
    inverse.push_back(out);
  }
  const auto fibers = static_cast<std::int64_t>(l.fibers);
#pragma omp parallel for schedule(static)
  for (std::int64_t f = 0; f < fibers; ++f) {
    const Entries target = spec.decode(static_cast<Code>(f) * l.m);
    Entries src{};
    for (std::size_t j = 0; j < l.ns; ++j) {
      spec.mul_entries(inverse[j], target, src);
      const Code t = spec.encode(src);
      // s_j (t_fiber, 0) = (f, -t_last), hence shift = -t_last.
      const std::uint64_t last = t % l.m;
      preds[f * l.ns + j] = {static_cast<std::uint32_t>(t / l.m),
                             static_cast<std::uint32_t>(last == 0 ? 0 : l.m - last)};
    }
  }
  return preds;
}

// dst |= src rotated left by sh inside an m-bit cyclic register.
inline void rotate_or(const Word64* src, Word64* dst, std::uint64_t sh, const Layout& l) {
  if (l.words == 1) {
    const Word64 x = src[0];
    if (sh == 0) {
      dst[0] |= x;
      return;
    }
    dst[0] |= ((x << sh) | (x >> (l.m - sh))) & l.top_mask;
    return;
  }
  if (sh == 0) {
    for (std::size_t i = 0; i < l.words; ++i) dst[i] |= src[i];
    return;
  }
  const std::size_t W = l.words;
  {  // low part: bit c -> c + sh
    const std::size_t ws = sh >> 6;
    const unsigned bs = sh & 63;
    for (std::size_t i = W; i-- > ws;) {
      Word64 v = src[i - ws] << bs;
      if (bs && i > ws) v |= src[i - ws - 1] >> (64 - bs);
      dst[i] |= (i == W - 1) ? (v & l.top_mask) : v;
    }
  }
  {  // wrapped part: bit c -> c - (m - sh)
    const std::uint64_t r = l.m - sh;
    const std::size_t ws = r >> 6;
    const unsigned bs = r & 63;
    for (std::size_t i = 0; i + ws < W; ++i) {
      Word64 v = src[i + ws] >> bs;
      if (bs && i + ws + 1 < W) v |= src[i + ws + 1] << (64 - bs);
      dst[i] |= v;
    }
  }
}

// Runs the level-synchronous pull BFS. Returns nullopt if a distance did not
// fit in dm's cells.
std::optional<BfsSummary> run_kernel(const GroupSpec& spec, const GeneratingSet& gens, const Layout& l,
                                     DistanceMap* dm) {
  const std::vector<Pred> preds = build_predecessors(spec, gens, l);
  const std::size_t W = l.words;
  std::vector<Word64> visited(l.fibers * W, 0), frontier(l.fibers * W, 0), next(l.fibers * W, 0);
  std::vector<std::uint8_t> front_flag(l.fibers, 0), next_flag(l.fibers, 0), full(l.fibers, 0);

  visited[0] = 1;
  frontier[0] = 1;
  front_flag[0] = 1;
  if (l.m == 1) full[0] = 1;
  if (dm) dm->set(0, 0);

  BfsSummary summary;
  summary.reached = 1;
  summary.level_sizes.push_back(1);
  const auto fibers = static_cast<std::int64_t>(l.fibers);
  const std::uint32_t max_level = dm ? dm->max_storable() : DistanceMap::kUnreached - 1;

  for (std::uint32_t level = 1;; ++level) {
    Code fresh = 0;
    std::atomic<bool> overflow{false};
#pragma omp parallel reduction(+ : fresh)
    {
      std::vector<Word64> acc(W);
#pragma omp for schedule(dynamic, 256)
      for (std::int64_t f = 0; f < fibers; ++f) {
        next_flag[f] = 0;
        if (full[f]) continue;
        std::fill(acc.begin(), acc.end(), 0);
        bool any = false;
        const Pred* p = &preds[f * l.ns];
        for (std::size_t j = 0; j < l.ns; ++j) {
          if (!front_flag[p[j].src]) continue;
          rotate_or(&frontier[p[j].src * W], acc.data(), p[j].shift, l);
          any = true;
        }
        if (!any) continue;
        Word64* vis = &visited[f * W];
        Word64* out = &next[f * W];
        Code count = 0;
        bool is_full = true;
        for (std::size_t i = 0; i < W; ++i) {
          const Word64 nw = acc[i] & ~vis[i];
          out[i] = nw;
          vis[i] |= nw;
          count += static_cast<Code>(std::popcount(nw));
          is_full &= vis[i] == (i == W - 1 ? l.top_mask : ~Word64{0});
        }
        if (count == 0) continue;
        next_flag[f] = 1;
        full[f] = is_full;
        fresh += count;
        if (dm) {
          if (level > max_level) {
            overflow.store(true, std::memory_order_relaxed);
            continue;
          }
          const Code base = static_cast<Code>(f) * l.m;
          for (std::size_t i = 0; i < W; ++i) {
            for (Word64 nw = out[i]; nw; nw &= nw - 1)
              dm->set(base + i * 64 + static_cast<Code>(std::countr_zero(nw)), level);
          }
        }
      }
    }
    if (overflow.load()) return std::nullopt;
    if (fresh == 0) break;
    summary.eccentricity = level;
    summary.reached += fresh;
    summary.level_sizes.push_back(fresh);
    frontier.swap(next);
    front_flag.swap(next_flag);
  }
  summary.relaxations = summary.reached * l.ns;
  return summary;
}

Layout checked_layout(const GroupSpec& spec, const GeneratingSet& gens) {
  if (gens.symmetric().empty()) throw PreconditionError("generating set has no non-identity element");
  Layout l = make_layout(spec, gens);
  if (l.fibers > std::numeric_limits<std::uint32_t>::max() || l.m > std::numeric_limits<std::uint32_t>::max())
    throw ResourceError("group too large for 32-bit fiber indices: " + spec.descriptor());
  return l;
}

}  // namespace

std::uint64_t kernel_memory_estimate(const GroupSpec& spec, const GeneratingSet& gens) {
  return memory_estimate(make_layout(spec, gens), 0, spec.order());
}

BfsSummary bfs_eccentricity(const GroupSpec& spec, const GeneratingSet& gens, const BfsOptions& opts) {
  const Layout l = checked_layout(spec, gens);
  const auto bytes = memory_estimate(l, 0, spec.order());
  if (bytes > opts.memory_cap_bytes)
    throw ResourceError("BFS on " + spec.descriptor() + " needs " + std::to_string(bytes) +
                        " bytes, above the cap");
  return *run_kernel(spec, gens, l, nullptr);
}

DistanceMap bfs_distance_map(const GroupSpec& spec, const GeneratingSet& gens, const BfsOptions& opts) {
  const Layout l = checked_layout(spec, gens);
  const std::uint64_t bound = std::min<std::uint64_t>(spec.order() - 1, opts.diameter_bound_cap);
  int width = opts.initial_cell_width;
  if (width == 0) width = 1;
  // 8-bit cells first; a distance above the cell range triggers a re-run with
  // wider cells.
  for (; width <= 4; width *= 2) {
    const auto bytes = memory_estimate(l, width, spec.order());
    if (bytes > opts.memory_cap_bytes)
      throw ResourceError("BFS on " + spec.descriptor() + " needs " + std::to_string(bytes) +
                          " bytes, above the cap");
    DistanceMap dm(spec, gens, width);
    if (run_kernel(spec, gens, l, &dm)) return dm;
    if (bound <= dm.max_storable()) break;
  }
  throw ResourceError("distance exceeds the cell width allowed by the diameter bound cap");
}

}  // namespace nilcayley
