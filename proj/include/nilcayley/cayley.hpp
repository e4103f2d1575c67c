#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <vector>

#include "nilcayley/group.hpp"
#include "nilcayley/word.hpp"

namespace nilcayley {

struct BfsOptions {
  /// Upper bound on bytes allocated by one BFS; checked before allocation.
  std::uint64_t memory_cap_bytes = std::uint64_t{4} << 30;
  /// Cap applied to the a-priori diameter bound when picking a cell width.
  std::uint64_t diameter_bound_cap = std::numeric_limits<std::uint32_t>::max() - 1;
  /// Start at this cell width in bytes (1, 2 or 4); widened on overflow.
  int initial_cell_width = 0;  // 0 = choose from the bound
};

/// Word-metric distances from the identity over all of G. Cells are 1, 2 or 4
/// bytes wide; the all-ones cell value marks an unreached element.
class DistanceMap {
 public:
  static constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

  DistanceMap(GroupSpec spec, GeneratingSet gens, int cell_width);

  const GroupSpec& spec() const noexcept { return spec_; }
  const GeneratingSet& gens() const noexcept { return gens_; }
  Code size() const noexcept { return spec_.order(); }
  int cell_width() const noexcept { return width_; }
  /// Largest storable distance for the cell width.
  std::uint32_t max_storable() const noexcept { return sentinel_ - 1; }

  std::uint32_t operator[](Code g) const {
    switch (width_) {
      case 1: return widen(cells_[g]);
      case 2: return widen(reinterpret_cast<const std::uint16_t*>(cells_.data())[g]);
      default: return widen(reinterpret_cast<const std::uint32_t*>(cells_.data())[g]);
    }
  }
  void set(Code g, std::uint32_t d) {
    switch (width_) {
      case 1: cells_[g] = static_cast<std::uint8_t>(d); break;
      case 2: reinterpret_cast<std::uint16_t*>(cells_.data())[g] = static_cast<std::uint16_t>(d); break;
      default: reinterpret_cast<std::uint32_t*>(cells_.data())[g] = d; break;
    }
  }

  bool complete() const;

  /// 16-byte header (magic, descriptor hash, cell width, length) followed by
  /// raw little-endian cells.
  void save(const std::filesystem::path& path) const;
  static DistanceMap load(const std::filesystem::path& path, const GroupSpec& spec,
                          const GeneratingSet& gens);

  bool operator==(const DistanceMap& o) const {
    return spec_ == o.spec_ && width_ == o.width_ && cells_ == o.cells_;
  }

 private:
  std::uint32_t widen(std::uint32_t v) const { return v == sentinel_ ? kUnreached : v; }

  GroupSpec spec_;
  GeneratingSet gens_;
  int width_;
  std::uint32_t sentinel_;
  std::vector<std::uint8_t> cells_;
};

std::uint32_t descriptor_hash(const GroupSpec& spec);

/// Statistics of one BFS, without necessarily keeping the distances.
struct BfsSummary {
  std::uint32_t eccentricity = 0;   // largest level reached
  Code reached = 0;                 // elements reached, identity included
  std::uint64_t relaxations = 0;    // reached * |S|: every edge out of a reached vertex
  std::vector<Code> level_sizes;    // sphere sizes, level 0 first
  bool complete(const GroupSpec& spec) const { return reached == spec.order(); }
};

/// Serial frontier-queue BFS: two swap buffers of element codes and a visited
/// bitmap, neighbors computed with the generic group law. Reference
/// implementation for the parallel kernels.
DistanceMap bfs_reference(const GroupSpec& spec, const GeneratingSet& gens,
                          const BfsOptions& opts = {});

/// Distance map computed with the parallel fiber kernel (see bfs_kernel.cpp).
DistanceMap bfs_distance_map(const GroupSpec& spec, const GeneratingSet& gens,
                             const BfsOptions& opts = {});

/// Eccentricity of the identity with the parallel fiber kernel; keeps only
/// bitsets, so it runs on groups whose distance map would not fit.
BfsSummary bfs_eccentricity(const GroupSpec& spec, const GeneratingSet& gens,
                            const BfsOptions& opts = {});

/// Bytes bfs_eccentricity would allocate.
std::uint64_t kernel_memory_estimate(const GroupSpec& spec, const GeneratingSet& gens);

// ---------------------------------------------------------------------------
// Diameters

/// diam(Gamma(G,S)): the largest distance (eccentricity of the identity, which
/// is the graph diameter by left-invariance). Throws NotGeneratingError when
/// some element is unreached.
std::uint32_t diameter(const DistanceMap& dm);

/// diam(G^(i), S) in the ambient word metric, 1 <= i <= class + 1.
std::uint32_t subgroup_diameter(const DistanceMap& dm, int i);

/// diam(G^(i)/G^(i+1), S) under the metric induced from Gamma(G,S): the max over
/// cosets of the min distance inside the coset.
std::uint32_t quotient_diameter(const DistanceMap& dm, int i);

/// Generic induced-quotient diameter of a normal subgroup H modulo a normal
/// subgroup N: in_h selects H, key maps each h to its coset index in [0, keys).
std::uint32_t coset_diameter(const DistanceMap& dm, const std::function<bool(Code)>& in_h,
                             const std::function<Code(Code)>& key, Code keys);

/// Geodesic word for target by greedy descent through the map.
Word shortest_word(const DistanceMap& dm, Code target);

/// Largest |dist[g] - dist[s g]| over all g and s; 1 for a valid complete map.
std::uint32_t max_neighbor_gap(const DistanceMap& dm);

struct FiltrationRow {
  int i = 0;
  std::uint32_t subgroup = 0;  // diam(G^(i), S)
  std::uint32_t quotient = 0;  // diam(G^(i)/G^(i+1), S)
};

struct FiltrationReport {
  std::vector<FiltrationRow> rows;  // i = 1..class
  std::uint32_t diam = 0;           // diam(Gamma(G,S))
  std::uint32_t diam_ab = 0;        // diam(Gamma(G^ab, S))

  /// quotient(i) <= subgroup(i) <= quotient(i) + subgroup(i+1) on every row.
  bool sandwich_holds() const;
  /// diam <= sum of quotient diameters.
  bool telescoping_holds() const;
};

FiltrationReport filtration_report(const DistanceMap& dm, const DistanceMap& ab_map);
FiltrationReport filtration_report(const GroupSpec& spec, const GeneratingSet& gens,
                                   const BfsOptions& opts = {});

}  // namespace nilcayley
