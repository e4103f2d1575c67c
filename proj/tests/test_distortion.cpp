#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "nilcayley/cayley.hpp"
#include "nilcayley/distortion.hpp"
#include "nilcayley/errors.hpp"
#include "nilcayley/harness.hpp"
#include "nilcayley/rng.hpp"

using namespace nilcayley;

namespace {

Code el(const GroupSpec& spec, std::initializer_list<std::int64_t> v) {
  Entries e{};
  std::copy(v.begin(), v.end(), e.begin());
  return spec.encode(e);
}

std::int64_t ipow(std::int64_t a, int i) {
  std::int64_t r = 1;
  while (i-- > 0) r *= a;
  return r;
}

DistanceMap ab_map_of(const GroupSpec& spec, const GeneratingSet& gens) {
  return bfs_distance_map(spec.abelianisation(), gens.abelianised(spec));
}

}  // namespace

TEST_CASE("integer roots") {
  CHECK(integer_root(0, 3) == 0);
  CHECK(integer_root(26, 3) == 2);
  CHECK(integer_root(27, 3) == 3);
  CHECK(integer_root(std::int64_t{1} << 62, 2) == std::int64_t{1} << 31);
  CHECK(integer_root(std::numeric_limits<std::int64_t>::max(), 2) == 3037000499);
  for (std::int64_t x = 0; x < 5000; ++x)
    for (int i = 1; i <= 4; ++i) {
      const auto r = integer_root(x, i);
      CHECK((ipow(r, i) <= x && ipow(r + 1, i) > x));
    }
}

TEST_CASE("n_required examples") {
  CHECK(n_required(1) == 1);
  CHECK(n_required(2) == 2);
  CHECK(n_required(3) == 3);
  for (int i = 2; i <= 6; ++i) {
    const double p = (i - 1.0) / i;
    const int n = n_required(i);
    CHECK(std::pow(p, n) < 1.0 / i);
    CHECK(std::pow(p, n - 1) >= 1.0 / i);
  }
}

TEST_CASE("power_decompose examples") {
  auto d = power_decompose(10, 2);
  CHECK(d.parts == std::vector<std::int64_t>{3, 1});
  CHECK(d.remainder == 0);
  d = power_decompose(7, 3);
  CHECK(d.parts == std::vector<std::int64_t>{1, 1, 1});
  CHECK(d.remainder == 4);
  CHECK(d.remainder <= remainder_constant(3) * std::cbrt(7.0));
  for (std::int64_t lambda : {0, 1, 17, 123456}) {
    d = power_decompose(lambda, 1);
    CHECK(d.parts == std::vector<std::int64_t>{lambda});
    CHECK(d.remainder == 0);
  }
  CHECK_THROWS_AS(power_decompose(-1, 2), PreconditionError);
  CHECK_THROWS_AS(power_decompose(5, 0), PreconditionError);
}

TEST_CASE("power_decompose is exact and within the proof bound") {
  for (int i = 1; i <= 4; ++i) {
    const double bound = remainder_constant(i);
    double worst = 0;
    int failures = 0;
    for (std::int64_t lambda = 0; lambda <= 1'000'000; lambda += 1 + lambda / 20000) {
      const auto d = power_decompose(lambda, i);
      std::int64_t sum = d.remainder;
      for (std::size_t h = 0; h < d.parts.size(); ++h) {
        sum += ipow(d.parts[h], i);
        if (h && d.parts[h] > d.parts[h - 1]) ++failures;
      }
      if (sum != lambda || d.remainder < 0 || static_cast<int>(d.parts.size()) != n_required(i)) ++failures;
      if (lambda > 0) {
        const double ratio = d.remainder / std::pow(static_cast<double>(lambda), 1.0 / i);
        worst = std::max(worst, ratio);
        if (ratio > bound) ++failures;
      }
    }
    CAPTURE(i);
    CHECK(failures == 0);
    CHECK(worst <= bound);
  }
}

TEST_CASE("nested commutator lengths and constants") {
  CHECK(nested_commutator_length(1) == 1);
  CHECK(nested_commutator_length(2) == 4);
  CHECK(nested_commutator_length(3) == 10);
  CHECK(greedy_step_constant(2) == 4);
  CHECK(greedy_step_constant(3) == 12);
  const auto h = GroupSpec::unitriangular(7, 4);
  const GeneratingSet gens(h, {el(h, {1, 0, 0, 0, 0, 0}), el(h, {0, 1, 0, 0, 0, 0}), el(h, {0, 0, 1, 0, 0, 0})});
  const Word w = nested_commutator({Word::parse("+0"), Word::parse("+1"), Word::parse("+2")});
  CHECK(static_cast<std::int64_t>(w.length()) == nested_commutator_length(3));
  CHECK(word_eval(h, gens, w) == commutator(h, gens.positives()[0], commutator(h, gens.positives()[1], gens.positives()[2])));
}

TEST_CASE("synthesize_layer_word examples") {
  const auto h = GroupSpec::unitriangular(11, 3);
  const GeneratingSet gens(h, {el(h, {1, 0, 0}), el(h, {0, 1, 0})});
  const auto ab = ab_map_of(h, gens);
  CHECK(synthesize_layer_word(h, gens, 0, ab).empty());

  const Word w1 = synthesize_layer_word(h, gens, el(h, {0, 0, 1}), ab);
  CHECK(w1 == Word::parse("+0 +1 -0 -1"));

  const Word w4 = synthesize_layer_word(h, gens, el(h, {0, 0, 4}), ab);
  CHECK(w4 == Word::parse("+0 +0 +1 +1 -0 -0 -1 -1"));
  CHECK(word_eval(h, gens, w4) == el(h, {0, 0, 4}));

  CHECK_THROWS_AS(synthesize_layer_word(h, gens, el(h, {1, 0, 0}), ab), PreconditionError);
}

TEST_CASE("top-layer synthesis is exact and within the layer bound") {
  std::mt19937_64 rng(1);
  for (auto [q, d] : std::vector<std::pair<std::int64_t, int>>{{5, 3}, {31, 3}, {5, 4}, {7, 4}, {3, 5}}) {
    const auto h = GroupSpec::unitriangular(q, d);
    const int c = h.nilpotency_class();
    for (int t = 0; t < 5; ++t) {
      const int k = h.rank() + t % 2;
      const auto gens = sample_generating_set(h, k, SamplingMode::iid_generators, rng);
      const auto ab = ab_map_of(h, gens);
      const double bound = layer_length_constant(k, c) * std::pow(diameter(ab), 1.0 / c);
      for (Code target = 0; target < h.subgroup_order(c); ++target) {
        const Word w = synthesize_layer_word(h, gens, target, ab);
        CHECK(word_eval(h, gens, w) == target);
        CHECK(w.length() <= bound);
      }
    }
  }
}

TEST_CASE("full_synthesize on every target of H_{5,3}") {
  const auto h = GroupSpec::unitriangular(5, 3);
  std::mt19937_64 rng(2);
  int failures = 0;
  for (int t = 0; t < 20; ++t) {
    const auto gens = sample_generating_set(h, 3, SamplingMode::iid_generators, rng);
    const auto ab = ab_map_of(h, gens);
    for (Code target = 0; target < h.order(); ++target) {
      const auto s = full_synthesize(h, gens, target, ab);
      failures += word_eval(h, gens, s.word) != target;
      failures += s.word.length() > s.diam_ab + s.bound_constant * std::sqrt(static_cast<double>(s.diam_ab));
      failures += s.word.length() != s.abelian_length + s.layer2_length + s.top_length;
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("full_synthesize in class 3") {
  std::mt19937_64 rng(3);
  for (std::int64_t q : {3, 5, 7}) {
    const auto h = GroupSpec::unitriangular(q, 4);
    for (int t = 0; t < 3; ++t) {
      const auto gens = sample_generating_set(h, 3 + t % 2, SamplingMode::iid_generators, rng);
      const auto ab = ab_map_of(h, gens);
      for (int n = 0; n < 200; ++n) {
        const Code target = uniform_below(rng, h.order());
        const auto s = full_synthesize(h, gens, target, ab);
        CHECK(word_eval(h, gens, s.word) == target);
        CHECK(s.word.length() <= s.diam_ab + s.bound_constant * std::sqrt(static_cast<double>(s.diam_ab)));
      }
    }
  }
}

TEST_CASE("full_synthesize on abelian groups returns geodesics") {
  const auto a = GroupSpec::abelian({7, 9});
  const GeneratingSet gens(a, {1, 9, 10});
  const auto dm = bfs_distance_map(a, gens);
  for (Code g = 0; g < a.order(); ++g) {
    const auto s = full_synthesize(a, gens, g, dm);
    CHECK(s.word.length() == dm[g]);
    CHECK(word_eval(a, gens, s.word) == g);
  }
}

TEST_CASE("full_synthesize preconditions") {
  const auto h = GroupSpec::unitriangular(5, 3);
  const GeneratingSet x(h, {el(h, {1, 0, 0})});
  const GeneratingSet good(h, {el(h, {1, 0, 0}), el(h, {0, 1, 0})});
  CHECK_THROWS_AS(full_synthesize(h, x, 1, ab_map_of(h, x)), NotGeneratingError);
  CHECK_THROWS_AS(full_synthesize(h, good, 1, ab_map_of(h, x)), PreconditionError);
  CHECK_THROWS_AS(full_synthesize(h, good, h.order(), ab_map_of(h, good)), InvalidElementError);
  const auto h5 = GroupSpec::unitriangular(2, 5);
  std::mt19937_64 rng(4);
  const auto g5 = sample_generating_set(h5, 4, SamplingMode::iid_generators, rng);
  CHECK_THROWS_AS(full_synthesize(h5, g5, 1, ab_map_of(h5, g5)), PreconditionError);
}
