#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace nilcayley::intlinalg {

using BigInt = boost::multiprecision::cpp_int;
/// Row-major dense integer matrix: m[row][col].
using Matrix = std::vector<std::vector<BigInt>>;

Matrix zeros(std::size_t rows, std::size_t cols);
Matrix identity(std::size_t n);

/// Column-style Hermite reduction: finds a unimodular U with A U = H where H
/// is in column echelon form (pivot of column j strictly below the pivot of
/// column j-1, positive pivots, zero columns at the end). Columns are
/// combined by extended-gcd steps in left-to-right order.
struct ColumnEchelon {
  Matrix h;
  Matrix u;
  std::vector<std::size_t> pivot_rows;  // pivot_rows[j] = row of pivot in column j
  std::size_t rank() const { return pivot_rows.size(); }
};
ColumnEchelon column_echelon(const Matrix& a);

/// Integer solution x of A x = t, if one exists.
std::optional<std::vector<BigInt>> solve(const Matrix& a, const std::vector<BigInt>& t);

/// True iff the columns of A span Z^rows.
bool spans_full_lattice(const Matrix& a);

/// Exact determinant (Bareiss fraction-free elimination).
BigInt determinant(const Matrix& a);

/// Basis of {x in Z^k : x_1 c_1 + ... + x_k c_k = 0 in (+)_t Z/m_t}, where c_j
/// is the j-th column of the r x k residue matrix g. Columns of the result
/// are the basis vectors.
Matrix congruence_kernel_basis(const std::vector<std::int64_t>& moduli,
                               const std::vector<std::vector<std::int64_t>>& g);

/// Solve sum_j x_j c_j = t in (+)_t Z/m_t with the columns c_j of g.
/// Returned residues are reduced into [0, lcm(moduli)).
std::optional<std::vector<std::int64_t>> solve_modular(
    const std::vector<std::int64_t>& moduli, const std::vector<std::vector<std::int64_t>>& g,
    const std::vector<std::int64_t>& t);

}  // namespace nilcayley::intlinalg
