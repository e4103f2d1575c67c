#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "nilcayley/errors.hpp"
#include "nilcayley/intlinalg.hpp"

namespace nilcayley {

/// L = {x in Z^k : sum_j x_j g_j = 0 in (+)_t Z/m_t}, where g_j is the j-th
/// column of the r x k residue matrix. Index of L in Z^k is the covolume
/// prod m_t exactly when the columns generate the finite group.
class IntegerLattice {
 public:
  /// Descriptor "lat:k=K;mod=m1,..;g=row-major r x k residues".
  static IntegerLattice parse(std::string_view descriptor);
  std::string descriptor() const;

  int k() const noexcept { return k_; }
  const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }
  const std::vector<std::vector<std::int64_t>>& generators() const noexcept { return g_; }
  std::uint64_t covolume() const noexcept { return covolume_; }

  /// Basis of L as matrix columns (Hermite-derived, then LLL-reduced).
  const intlinalg::Matrix& basis() const noexcept { return basis_; }
  bool contains(const std::vector<std::int64_t>& x) const;

 private:
  friend IntegerLattice lattice_from_generators(std::vector<std::int64_t> moduli,
                                                std::vector<std::vector<std::int64_t>> g);
  IntegerLattice() = default;

  int k_ = 0;
  std::vector<std::int64_t> moduli_;
  std::vector<std::vector<std::int64_t>> g_;
  std::uint64_t covolume_ = 1;
  intlinalg::Matrix basis_;
};

/// Throws NotGeneratingError when the columns of g do not generate.
IntegerLattice lattice_from_generators(std::vector<std::int64_t> moduli,
                                       std::vector<std::vector<std::int64_t>> g);

/// Max over cosets of Z^k / L of the least l1 norm of an integer
/// representative, by BFS in (+) Z/m_t with steps +-g_j.
std::uint64_t coset_diameter_exact(const IntegerLattice& lattice, std::uint64_t cap = 100'000'000);

/// Determinant-one lattice covolume^(-1/k) * B for an integer basis B. The
/// scale is kept as (covolume, k) and only applied in floating point.
class RescaledLattice {
 public:
  /// Columns of basis span the lattice; covolume is |det basis|.
  static RescaledLattice from_integer_basis(const intlinalg::Matrix& basis);

  int k() const noexcept { return k_; }
  std::uint64_t covolume() const noexcept { return covolume_; }
  const intlinalg::Matrix& integer_basis() const noexcept { return basis_; }
  double scale() const;
  /// Scaled basis, column-major: real_basis()[j] is the j-th basis vector.
  std::vector<std::vector<double>> real_basis() const;
  /// Exact check that |det(integer basis)| equals the covolume.
  bool unimodular_exact() const;

 private:
  int k_ = 0;
  std::uint64_t covolume_ = 1;
  intlinalg::Matrix basis_;
};

RescaledLattice rescale(const IntegerLattice& lattice);

/// LLL-reduce the columns of an integer basis (delta = 0.99).
intlinalg::Matrix lll_reduce(const intlinalg::Matrix& basis);

struct Enclosure {
  double lo = 0;
  double hi = 0;
  std::uint64_t evaluations = 0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct TorusOptions {
  std::uint64_t max_evaluations = 4'000'000;
};

class BudgetError : public ResourceError {
 public:
  BudgetError(const std::string& what, Enclosure best) : ResourceError(what), best_(best) {}
  const Enclosure& best() const noexcept { return best_; }

 private:
  Enclosure best_;
};

/// Min over lattice points v of ||x - v||_1.
double l1_distance_to_lattice(const RescaledLattice& lattice, const std::vector<double>& x);

/// Certified enclosure of the l1 covering radius max_x min_v ||x - v||_1,
/// which is the diameter of R^k / L in the quotient l1 metric.
/// Branch and bound over the fundamental parallelepiped: the distance function
/// is 1-Lipschitz in l1, so its value at a cell centre plus the cell's l1
/// radius bounds it over the whole cell.
Enclosure torus_diameter_l1(const RescaledLattice& lattice, double eps, const TorusOptions& opts = {});

/// Random congruence lattice at a large prime modulus, rescaled to covolume 1;
/// a stand-in for a Haar-random unimodular lattice.
RescaledLattice sample_haar_proxy(int k, std::int64_t q, std::mt19937_64& rng);

}  // namespace nilcayley
