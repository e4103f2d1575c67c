#include "nilcayley/distortion.hpp"

#include <cmath>
#include <stdexcept>

#include "nilcayley/errors.hpp"
#include "nilcayley/intlinalg.hpp"

namespace nilcayley {

namespace {

// a^i <= limit, without overflow.
bool pow_at_most(std::int64_t a, int i, std::int64_t limit) {
  __int128 acc = 1;
  for (int e = 0; e < i; ++e) {
    acc *= a;
    if (acc > limit) return false;
  }
  return true;
}

std::int64_t ipow(std::int64_t a, int i) {
  std::int64_t acc = 1;
  for (int e = 0; e < i; ++e) acc *= a;
  return acc;
}

}  // namespace

std::int64_t integer_root(std::int64_t x, int i) {
  if (x < 0 || i < 1) throw PreconditionError("integer_root needs x >= 0 and i >= 1");
  if (i == 1 || x < 2) return x;
  std::int64_t lo = 1, hi = 1;
  while (pow_at_most(hi, i, x)) hi *= 2;
  // invariant: lo^i <= x < hi^i
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (pow_at_most(mid, i, x) ? lo : hi) = mid;
  }
  return lo;
}

int n_required(int i) {
  if (i < 1) throw PreconditionError("n_required needs i >= 1");
  using intlinalg::BigInt;
  // ((i-1)/i)^j < 1/i  <=>  i (i-1)^j < i^j
  BigInt num = i - 1, den = i;
  for (int j = 1;; ++j) {
    if (BigInt(i) * num < den) return j;
    num *= (i - 1);
    den *= i;
  }
}

PowerDecomposition power_decompose(std::int64_t lambda, int i) {
  if (lambda < 0 || i < 1) throw PreconditionError("power_decompose needs lambda >= 0 and i >= 1");
  PowerDecomposition out;
  out.i = i;
  out.lambda = lambda;
  std::int64_t rest = lambda;
  const int n = n_required(i);
  for (int h = 0; h < n; ++h) {
    const std::int64_t a = integer_root(rest, i);
    out.parts.push_back(a);
    rest -= ipow(a, i);
  }
  out.remainder = rest;
  return out;
}

double greedy_step_constant(int i) { return i * std::ldexp(1.0, i - 1); }

double remainder_constant(int i) {
  const double p = static_cast<double>(i - 1) / i;
  double exponent = 0, term = 1;
  for (int h = 0; h < n_required(i); ++h) {
    exponent += term;
    term *= p;
  }
  return std::pow(greedy_step_constant(i), exponent);
}

std::int64_t nested_commutator_length(int c) {
  if (c < 1) throw PreconditionError("nested commutator needs at least one slot");
  std::int64_t len = 1;
  for (int j = 2; j <= c; ++j) len = 2 + 2 * len;
  return len;
}

double layer_length_constant(int k, int c) {
  return static_cast<double>(nested_commutator_length(c)) * (n_required(c) + remainder_constant(c)) *
         std::pow(k, c - 1) * std::pow(k, 1.0 - 1.0 / c);
}

Word nested_commutator(const std::vector<Word>& slots) {
  if (slots.empty()) throw PreconditionError("nested commutator needs at least one slot");
  Word acc = slots.back();
  for (std::size_t j = slots.size() - 1; j-- > 0;) acc = commutator_word(slots[j], acc);
  return acc;
}

namespace {

void check_ab_map(const GroupSpec& spec, const GeneratingSet& gens, const DistanceMap& ab_map) {
  if (!(ab_map.spec() == spec.abelianisation()) || ab_map.gens().positives() != gens.abelianised(spec).positives())
    throw PreconditionError("ab_map is not the abelianised Cayley graph of this generating set");
  if (!generates(spec, gens.positives())) throw NotGeneratingError("generating set does not generate");
}

std::vector<int> tuple_at(std::size_t index, int k, int len) {
  std::vector<int> f(len);
  for (int j = len - 1; j >= 0; --j) {
    f[j] = static_cast<int>(index % k);
    index /= k;
  }
  return f;
}

// Emits prod_x [g1, [..., x]]^net_x for the geodesic net exponents of y, whose
// layer-i value is the multilinear map at (prefix, y).
Word emit_collected(const std::vector<int>& prefix, Code y, int k, int i, const DistanceMap& ab_map) {
  Word out;
  if (y == 0) return out;
  std::vector<std::int64_t> net(k, 0);
  const Word geodesic = shortest_word(ab_map, y);
  for (const auto& l : geodesic.letters()) net[l.gen] += l.inverse ? -1 : 1;

  // distortion: |lambda| = sum a_h^i + r, emit [g1^a, [..., x^a]] per part and
  // r copies of the plain commutator; negative lambda uses [A,B]^-1 = [B,A].
  for (int x = 0; x < k; ++x) {
    // [.., [g, g]] is the identity, so those letters cost length for nothing
    if (net[x] == 0 || prefix.back() == x) continue;
    const bool negative = net[x] < 0;
    const auto dec = power_decompose(negative ? -net[x] : net[x], i);
    auto emit = [&](std::int64_t a, std::int64_t copies) {
      if (a == 0 || copies == 0) return;
      std::vector<Word> slots;
      for (int g : prefix) slots.push_back(Word({{g, false}}).repeated(a));
      slots.push_back(Word({{x, false}}).repeated(a));
      Word c;
      if (!negative) {
        c = nested_commutator(slots);
      } else {
        std::vector<Word> inner(slots.begin() + 1, slots.end());
        c = commutator_word(nested_commutator(inner), slots.front());
      }
      out += c.repeated(copies);
    };
    for (auto a : dec.parts) emit(a, 1);
    emit(1, dec.remainder);
  }
  return out;
}

// Work cap for the single-prefix search: prefixes times |G^ab|.
constexpr double kSinglePrefixScan = 4e7;

// Word whose value agrees with the layer-i target modulo G^(i+1); exact when i
// is the class. target_digits are the layer-i coordinates of the target.
Word emit_layer(const GroupSpec& spec, const GeneratingSet& gens, int i,
                const std::vector<std::int64_t>& target_digits, const DistanceMap& ab_map) {
  const int k = gens.k();
  const GroupSpec ab = spec.abelianisation();
  const GroupSpec layer = spec.layer_spec(i);
  const int rows = layer.entry_count();
  std::vector<Code> ab_gens;
  for (Code z : gens.positives()) ab_gens.push_back(abelianise(spec, z));

  // (1) coefficients lambda_f over all tuples f in [k]^i, lexicographic.
  std::size_t tuples = 1;
  for (int j = 0; j < i; ++j) tuples *= k;
  std::vector<std::vector<std::int64_t>> values(rows, std::vector<std::int64_t>(tuples));
  for (std::size_t t = 0; t < tuples; ++t) {
    std::vector<Code> slot;
    for (int g : tuple_at(t, k, i)) slot.push_back(ab_gens[g]);
    const auto v = multilinear_layer_map(spec, i, slot);
    for (int row = 0; row < rows; ++row) values[row][t] = v[row];
  }
  auto lambda = intlinalg::solve_modular(layer.radices(), values, target_digits);
  if (!lambda) throw std::logic_error("layer values do not generate the layer");

  // (2) collect the last slot: y_g = sum_x lambda_(g,x) [x] in G^ab, then
  // replace y_g by a geodesic of Gamma(G^ab, S).
  Word out;
  const std::size_t prefixes = tuples / k;
  for (std::size_t p = 0; p < prefixes; ++p) {
    Code y = 0;
    for (int x = 0; x < k; ++x) {
      const auto coef = (*lambda)[p * k + x];
      if (coef) y = mul(ab, y, power(ab, ab_gens[x], coef));
    }
    out += emit_collected(tuple_at(p, k, i - 1), y, k, i, ab_map);
  }

  // Any y with map(prefix, y) = target also works for a single prefix. The
  // nearest such y is often far shorter than the collected ones above.
  if (static_cast<double>(prefixes) * static_cast<double>(ab.order()) > kSinglePrefixScan) return out;
  const int entries = ab.entry_count();
  Code best_y = 0;
  std::size_t best_p = 0;
  std::uint32_t best_d = DistanceMap::kUnreached;
  for (std::size_t p = 0; p < prefixes; ++p) {
    // map(prefix, u_e) for the unit entries u_e of G^ab; linear in y
    std::vector<Code> slot;
    for (int g : tuple_at(p, k, i - 1)) slot.push_back(ab_gens[g]);
    slot.push_back(0);
    std::vector<std::vector<std::int64_t>> unit(entries);
    for (int e = 0; e < entries; ++e) {
      Entries u{};
      u[e] = 1;
      slot.back() = ab.encode(u);
      unit[e] = multilinear_layer_map(spec, i, slot);
    }
    std::vector<std::int64_t> digit(entries, 0), value(rows, 0);
    for (Code y = 0; y < ab.order(); ++y) {
      if (value == target_digits && ab_map[y] < best_d) {
        best_d = ab_map[y];
        best_y = y;
        best_p = p;
      }
      // odometer step, last entry least significant
      for (int e = entries - 1; e >= 0; --e) {
        const bool wrap = ++digit[e] == ab.radix(e);
        for (int row = 0; row < rows; ++row) {
          value[row] += wrap ? unit[e][row] * (1 - ab.radix(e)) : unit[e][row];
          value[row] %= layer.radix(row);
          if (value[row] < 0) value[row] += layer.radix(row);
        }
        if (!wrap) break;
        digit[e] = 0;
      }
    }
  }
  if (best_d == DistanceMap::kUnreached) return out;
  Word single = emit_collected(tuple_at(best_p, k, i - 1), best_y, k, i, ab_map);
  return single.length() < out.length() ? single : out;
}

std::vector<std::int64_t> layer_digits(const GroupSpec& spec, int i, Code a) {
  const GroupSpec layer = spec.layer_spec(i);
  const Entries e = layer.decode(layer_key(spec, i, a));
  return {e.begin(), e.begin() + layer.entry_count()};
}

}  // namespace

Word synthesize_layer_word(const GroupSpec& spec, const GeneratingSet& gens, Code target,
                           const DistanceMap& ab_map) {
  check_ab_map(spec, gens, ab_map);
  const int c = spec.nilpotency_class();
  if (!lcs_member(spec, c, target))
    throw PreconditionError("synthesize_layer_word: target is not in the top layer G^(class)");
  if (target == 0) return {};
  if (c == 1) return shortest_word(ab_map, target);
  Word w = emit_layer(spec, gens, c, layer_digits(spec, c, target), ab_map);
  if (word_eval(spec, gens, w) != target) throw std::logic_error("layer synthesis produced a wrong word");
  return w;
}

Synthesis full_synthesize(const GroupSpec& spec, const GeneratingSet& gens, Code target,
                          const DistanceMap& ab_map) {
  check_ab_map(spec, gens, ab_map);
  require_element(spec, target);
  const int c = spec.nilpotency_class();
  if (c > 3) throw PreconditionError("full_synthesize supports class <= 3");

  Synthesis out;
  out.diam_ab = diameter(ab_map);
  out.bound_constant = 0;
  if (c >= 2) out.bound_constant += layer_length_constant(gens.k(), 2);
  if (c >= 3) out.bound_constant += layer_length_constant(gens.k(), 3);
  if (target == 0) return out;

  const Word w1 = shortest_word(ab_map, abelianise(spec, target));
  out.abelian_length = w1.length();
  if (c == 1) {
    out.word = w1;
    return out;
  }
  // target = rho * eval(w1), rho in G^(2)
  Code rho = mul(spec, target, inv(spec, word_eval(spec, gens, w1)));
  Word w2;
  if (c == 3) {
    w2 = emit_layer(spec, gens, 2, layer_digits(spec, 2, rho), ab_map);
    rho = mul(spec, rho, inv(spec, word_eval(spec, gens, w2)));
    if (!lcs_member(spec, 3, rho)) throw std::logic_error("layer-2 rewrite left a residual outside G^(3)");
    out.layer2_length = w2.length();
  }
  const Word top = synthesize_layer_word(spec, gens, rho, ab_map);
  out.top_length = top.length();
  out.word = top + w2 + w1;
  if (word_eval(spec, gens, out.word) != target) throw std::logic_error("full synthesis produced a wrong word");
  return out;
}

}  // namespace nilcayley
