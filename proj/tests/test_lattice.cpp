#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "nilcayley/cayley.hpp"
#include "nilcayley/errors.hpp"
#include "nilcayley/intlinalg.hpp"
#include "nilcayley/lattice.hpp"
#include "nilcayley/rng.hpp"

using namespace nilcayley;
using intlinalg::BigInt;
using intlinalg::Matrix;

namespace {

Matrix diag(std::initializer_list<long> d) {
  Matrix m = intlinalg::zeros(d.size(), d.size());
  std::size_t i = 0;
  for (long v : d) m[i][i] = v, ++i;
  return m;
}

double det_real(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  double det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    if (p != c) std::swap(a[p], a[c]), det = -det;
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

// Abelian spec and generating set matching a lattice's residue columns.
std::pair<GroupSpec, GeneratingSet> abelian_of(const IntegerLattice& L) {
  const auto spec = GroupSpec::abelian(L.moduli());
  std::vector<Code> gens;
  for (int j = 0; j < L.k(); ++j) {
    Entries e{};
    for (std::size_t t = 0; t < L.moduli().size(); ++t) e[t] = L.generators()[t][j];
    gens.push_back(spec.encode(e));
  }
  return {spec, GeneratingSet(spec, gens)};
}

// l1 distance by scanning integer coefficient boxes; the LLL basis keeps the
// needed box small.
double brute_l1(const RescaledLattice& L, const std::vector<double>& x, int radius) {
  const auto b = L.real_basis();
  const int k = L.k();
  std::vector<int> c(k, -radius);
  double best = 1e300;
  while (true) {
    double d = 0;
    for (int r = 0; r < k; ++r) {
      double v = x[r];
      for (int j = 0; j < k; ++j) v -= c[j] * b[j][r];
      d += std::fabs(v);
    }
    best = std::min(best, d);
    int j = 0;
    while (j < k && c[j] == radius) c[j++] = -radius;
    if (j == k) break;
    ++c[j];
  }
  return best;
}

}  // namespace

TEST_CASE("integer lattice examples") {
  const auto L = IntegerLattice::parse("lat:k=2;mod=5;g=1,2");
  CHECK(L.covolume() == 5);
  CHECK(L.contains({1, 2}));
  CHECK(L.contains({5, 0}));
  CHECK_FALSE(L.contains({1, 0}));
  CHECK(abs(intlinalg::determinant(L.basis())) == 5);
  CHECK(IntegerLattice::parse(L.descriptor()).descriptor() == L.descriptor());

  for (std::int64_t q : {2, 7, 101}) {
    const auto M = lattice_from_generators({q}, {{1, 0, 0}});
    CHECK(M.covolume() == static_cast<std::uint64_t>(q));
    CHECK(M.contains({q, 0, 0}));
    CHECK(M.contains({0, 1, 0}));
    CHECK(M.contains({0, 0, 1}));
    CHECK_FALSE(M.contains({1, 0, 0}));
  }
  CHECK_THROWS_AS(lattice_from_generators({6}, {{2, 4}}), NotGeneratingError);
  CHECK_THROWS_AS(IntegerLattice::parse("lat:k=2;mod=5"), PreconditionError);
  CHECK_THROWS_AS(IntegerLattice::parse("lattice:k=2;mod=5;g=1,2"), PreconditionError);
}

TEST_CASE("basis determinant equals the covolume") {
  std::mt19937_64 rng(1);
  int checked = 0;
  while (checked < 100) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const int r = 1 + static_cast<int>(rng() % 2);
    std::vector<std::int64_t> moduli;
    std::vector<std::vector<std::int64_t>> g(r, std::vector<std::int64_t>(k));
    for (int t = 0; t < r; ++t) {
      moduli.push_back(2 + static_cast<std::int64_t>(rng() % 300));
      for (auto& v : g[t]) v = static_cast<std::int64_t>(uniform_below(rng, moduli[t]));
    }
    try {
      const auto L = lattice_from_generators(moduli, g);
      CHECK(abs(intlinalg::determinant(L.basis())) == BigInt(L.covolume()));
      for (int j = 0; j < k; ++j) {
        std::vector<std::int64_t> col;
        for (int i = 0; i < k; ++i) col.push_back(static_cast<std::int64_t>(L.basis()[i][j]));
        CHECK(L.contains(col));
      }
      ++checked;
    } catch (const NotGeneratingError&) {
    }
  }
}

TEST_CASE("LLL keeps the lattice") {
  const Matrix skew{{1, 1000}, {0, 1}};
  const Matrix r = lll_reduce(skew);
  CHECK(abs(intlinalg::determinant(r)) == 1);
  for (const auto& row : r)
    for (const auto& v : row) CHECK(abs(v) <= 1);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    Matrix m = intlinalg::zeros(4, 4);
    for (auto& row : m)
      for (auto& v : row) v = static_cast<long>(uniform_below(rng, 2001)) - 1000;
    if (intlinalg::determinant(m) == 0) continue;
    const Matrix red = lll_reduce(m);
    CHECK(abs(intlinalg::determinant(red)) == abs(intlinalg::determinant(m)));
    // same lattice: each reduced column is an integer combination of the originals
    for (int j = 0; j < 4; ++j) {
      std::vector<BigInt> col;
      for (int i = 0; i < 4; ++i) col.push_back(red[i][j]);
      CHECK(intlinalg::solve(m, col).has_value());
    }
  }
}

TEST_CASE("coset diameter examples") {
  CHECK(coset_diameter_exact(IntegerLattice::parse("lat:k=2;mod=5;g=1,2")) == 1);
  for (std::int64_t q : {2, 5, 10, 101}) CHECK(coset_diameter_exact(lattice_from_generators({q}, {{1}})) == static_cast<std::uint64_t>(q / 2));
  CHECK_THROWS_AS(coset_diameter_exact(lattice_from_generators({1000}, {{1}}), 100), ResourceError);
}

TEST_CASE("coset diameter equals the abelian Cayley graph diameter") {
  std::mt19937_64 rng(3);
  int checked = 0;
  while (checked < 30) {
    const int k = 1 + static_cast<int>(rng() % 5);
    const std::int64_t q = 2 + static_cast<std::int64_t>(rng() % 2000);
    std::vector<std::vector<std::int64_t>> g(1, std::vector<std::int64_t>(k));
    for (auto& v : g[0]) v = static_cast<std::int64_t>(uniform_below(rng, q));
    try {
      const auto L = lattice_from_generators({q}, g);
      const auto [spec, gens] = abelian_of(L);
      CHECK(coset_diameter_exact(L) == diameter(bfs_distance_map(spec, gens)));
      ++checked;
    } catch (const NotGeneratingError&) {
    }
  }
}

TEST_CASE("rescale examples") {
  for (int k = 2; k <= 4; ++k) {
    const auto R = RescaledLattice::from_integer_basis(intlinalg::identity(k));
    CHECK(R.covolume() == 1);
    CHECK(R.scale() == doctest::Approx(1.0));
    CHECK(std::fabs(det_real(R.real_basis())) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::int64_t q : {3, 101, 1000003}) {
    const auto R = rescale(lattice_from_generators({q}, {{1, 0}}));
    CHECK(R.covolume() == static_cast<std::uint64_t>(q));
    CHECK(R.unimodular_exact());
    const auto b = R.real_basis();
    CHECK(std::fabs(det_real(b)) == doctest::Approx(1.0).epsilon(1e-12));
    // LLL of diag(q, 1) is diag(q, 1) up to signs and order
    std::vector<double> norms;
    for (const auto& col : b) norms.push_back(std::fabs(col[0]) + std::fabs(col[1]));
    std::sort(norms.begin(), norms.end());
    CHECK(norms[0] == doctest::Approx(1 / std::sqrt(static_cast<double>(q))));
    CHECK(norms[1] == doctest::Approx(std::sqrt(static_cast<double>(q))));
  }
}

TEST_CASE("l1 distance to the lattice") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 30; ++t) {
    const auto R = sample_haar_proxy(2 + t % 3, 101, rng);
    std::vector<double> x(R.k());
    for (auto& v : x) v = u(rng);
    CHECK(l1_distance_to_lattice(R, x) == doctest::Approx(brute_l1(R, x, 6)).epsilon(1e-9));
  }
}

TEST_CASE("torus diameter examples") {
  for (int k = 2; k <= 4; ++k) {
    const auto e = torus_diameter_l1(RescaledLattice::from_integer_basis(intlinalg::identity(k)), 1e-2);
    CAPTURE(k);
    CHECK(e.contains(k / 2.0));
    CHECK(e.width() <= 1e-2 + 1e-9);
  }
  // diag(4, 1) rescales to diag(2, 1/2)
  const auto e = torus_diameter_l1(RescaledLattice::from_integer_basis(diag({4, 1})), 1e-3);
  CHECK(e.contains(1.25));
  CHECK(e.width() <= 1e-3 + 1e-9);
  CHECK_THROWS_AS(torus_diameter_l1(RescaledLattice::from_integer_basis(diag({4, 1})), 0), PreconditionError);
}

TEST_CASE("torus diameter against a fine grid") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    const auto R = sample_haar_proxy(2, 1000003, rng);
    const auto e = torus_diameter_l1(R, 1e-3);
    const auto b = R.real_basis();
    double grid = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double s = (i + 0.5) / n, r = (j + 0.5) / n;
        grid = std::max(grid, l1_distance_to_lattice(R, {s * b[0][0] + r * b[1][0], s * b[0][1] + r * b[1][1]}));
      }
    CHECK(grid <= e.hi);
    CHECK(grid >= e.lo - 0.02);
  }
}

TEST_CASE("evaluation budget") {
  TorusOptions opts;
  opts.max_evaluations = 10;
  try {
    torus_diameter_l1(RescaledLattice::from_integer_basis(intlinalg::identity(4)), 1e-6, opts);
    FAIL("expected BudgetError");
  } catch (const BudgetError& b) {
    CHECK(b.best().contains(2.0));
    CHECK(b.exit_code() == ExitCode::resource);
  }
}

TEST_CASE("Haar proxy samples") {
  std::mt19937_64 a(6), b(6);
  for (int t = 0; t < 10; ++t) {
    const auto x = sample_haar_proxy(3, 1000003, a);
    const auto y = sample_haar_proxy(3, 1000003, b);
    CHECK(x.unimodular_exact());
    CHECK(x.covolume() == 1000003);
    CHECK(x.integer_basis() == y.integer_basis());
    CHECK(std::fabs(det_real(x.real_basis())) == doctest::Approx(1.0).epsilon(1e-10));
  }
  std::mt19937_64 c(7);
  const auto small = sample_haar_proxy(2, 5, c);
  CHECK(small.covolume() == 5);
  CHECK_THROWS_AS(sample_haar_proxy(1, 5, c), PreconditionError);
}
