#pragma once

#include <cstdint>
#include <vector>

#include "nilcayley/cayley.hpp"
#include "nilcayley/group.hpp"
#include "nilcayley/word.hpp"

namespace nilcayley {

/// lambda = parts[0]^i + ... + parts[n-1]^i + remainder, produced greedily
/// (each part is the integer i-th root of what is left).
struct PowerDecomposition {
  int i = 1;
  std::int64_t lambda = 0;
  std::vector<std::int64_t> parts;
  std::int64_t remainder = 0;
};

/// floor(x^(1/i)) for x >= 0, exact integer arithmetic.
std::int64_t integer_root(std::int64_t x, int i);

/// Smallest j with ((i-1)/i)^j < 1/i.
int n_required(int i);

/// Greedy decomposition with n_required(i) parts.
PowerDecomposition power_decompose(std::int64_t lambda, int i);

/// D_i = i * 2^(i-1): one greedy step leaves at most D_i * lambda^((i-1)/i).
double greedy_step_constant(int i);

/// C_i = D_i^(1 + p + ... + p^(n_i - 1)) with p = (i-1)/i; the remainder of
/// power_decompose obeys r <= C_i * lambda^(1/i) for lambda >= 1.
double remainder_constant(int i);

/// Letters in the right-nested commutator of c single letters:
/// L(1) = 1, L(c) = 2 + 2 L(c-1).
std::int64_t nested_commutator_length(int c);

/// Accounting constant of the layer synthesizer: the word for a top-layer
/// target of a class-c group with k generators has length at most
/// K(k, c) * diam_ab^(1/c) (there is no additive term).
///
///   K(k, c) = L(c) (n_c + C_c) k^(c - 1) k^(1 - 1/c)
///
/// L(c) (n_c + C_c) |lambda|^(1/c) bounds one (prefix, last letter) block;
/// Hoelder over the k last letters and the k^(c-1) prefixes gives the rest.
double layer_length_constant(int k, int c);

/// Right-nested commutator [w_1, [w_2, ..., [w_{n-1}, w_n]...]] of words.
Word nested_commutator(const std::vector<Word>& slots);

/// Word equal to a target in the top layer G^(c), c = class(spec).
/// ab_map is the distance map of Gamma(G^ab, projected gens).
Word synthesize_layer_word(const GroupSpec& spec, const GeneratingSet& gens, Code target,
                           const DistanceMap& ab_map);

struct Synthesis {
  Word word;
  std::size_t abelian_length = 0;  // geodesic part for the abelianised image
  std::size_t layer2_length = 0;   // layer-2 power products (class 3 only)
  std::size_t top_length = 0;      // top-layer part
  std::uint32_t diam_ab = 0;
  /// length <= diam_ab + bound_constant * sqrt(diam_ab) whenever diam_ab >= 1.
  double bound_constant = 0;
};

/// Word for an arbitrary target, for groups of class at most 3: a geodesic for
/// the abelianised image, then layer-by-layer corrections by distortion.
Synthesis full_synthesize(const GroupSpec& spec, const GeneratingSet& gens, Code target,
                          const DistanceMap& ab_map);

}  // namespace nilcayley
