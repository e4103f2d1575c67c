#include "nilcayley/intlinalg.hpp"

#include <numeric>
#include <stdexcept>

namespace nilcayley::intlinalg {

Matrix zeros(std::size_t rows, std::size_t cols) {
  return Matrix(rows, std::vector<BigInt>(cols, BigInt(0)));
}

Matrix identity(std::size_t n) {
  Matrix m = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

namespace {

// Extended gcd with g = s a + t b, g >= 0.
void ext_gcd(const BigInt& a, const BigInt& b, BigInt& g, BigInt& s, BigInt& t) {
  BigInt r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (r1 != 0) {
    BigInt qt = r0 / r1;
    BigInt tmp = r0 - qt * r1;
    r0 = r1;
    r1 = tmp;
    tmp = s0 - qt * s1;
    s0 = s1;
    s1 = tmp;
    tmp = t0 - qt * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (r0 < 0) {
    r0 = -r0;
    s0 = -s0;
    t0 = -t0;
  }
  g = r0;
  s = s0;
  t = t0;
}

// Floor division for BigInt (cpp_int division truncates toward zero).
BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Replace columns (p, c) by (s p + t c, (b/g) p - (a/g) c); unimodular.
void combine_columns(Matrix& m, std::size_t p, std::size_t c, const BigInt& s, const BigInt& t,
                     const BigInt& bp, const BigInt& ap) {
  for (auto& row : m) {
    BigInt x = row[p], y = row[c];
    row[p] = s * x + t * y;
    row[c] = bp * x - ap * y;
  }
}

}  // namespace

ColumnEchelon column_echelon(const Matrix& a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  ColumnEchelon out{a, identity(cols), {}};
  Matrix& h = out.h;
  Matrix& u = out.u;

  std::size_t next = 0;  // first column not yet holding a pivot
  for (std::size_t r = 0; r < rows && next < cols; ++r) {
    // Fold every later column's entry in row r into column `next`.
    for (std::size_t c = next + 1; c < cols; ++c) {
      if (h[r][c] == 0) continue;
      BigInt g, s, t;
      ext_gcd(h[r][next], h[r][c], g, s, t);
      BigInt ap = h[r][next] / g, bp = h[r][c] / g;
      combine_columns(h, next, c, s, t, bp, ap);
      combine_columns(u, next, c, s, t, bp, ap);
    }
    if (h[r][next] == 0) continue;
    if (h[r][next] < 0) {
      for (auto& row : h) row[next] = -row[next];
      for (auto& row : u) row[next] = -row[next];
    }
    // Reduce earlier pivot columns in this row into [0, pivot).
    for (std::size_t c = 0; c < next; ++c) {
      BigInt f = floor_div(h[r][c], h[r][next]);
      if (f == 0) continue;
      for (auto& row : h) row[c] -= f * row[next];
      for (auto& row : u) row[c] -= f * row[next];
    }
    out.pivot_rows.push_back(r);
    ++next;
  }
  return out;
}

std::optional<std::vector<BigInt>> solve(const Matrix& a, const std::vector<BigInt>& t) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  if (t.size() != rows) throw std::invalid_argument("solve: dimension mismatch");
  ColumnEchelon e = column_echelon(a);

  std::vector<BigInt> y(cols, BigInt(0));
  std::vector<BigInt> residual = t;
  std::size_t j = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (j < e.rank() && e.pivot_rows[j] == r) {
      if (residual[r] % e.h[r][j] != 0) return std::nullopt;
      y[j] = residual[r] / e.h[r][j];
      for (std::size_t rr = r; rr < rows; ++rr) residual[rr] -= y[j] * e.h[rr][j];
      ++j;
    } else if (residual[r] != 0) {
      return std::nullopt;
    }
  }
  std::vector<BigInt> x(cols, BigInt(0));
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t c = 0; c < cols; ++c) x[i] += e.u[i][c] * y[c];
  return x;
}

bool spans_full_lattice(const Matrix& a) {
  const std::size_t rows = a.size();
  ColumnEchelon e = column_echelon(a);
  if (e.rank() != rows) return false;
  for (std::size_t j = 0; j < rows; ++j)
    if (e.h[e.pivot_rows[j]][j] != 1) return false;
  return true;
}

BigInt determinant(const Matrix& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  Matrix m = a;
  BigInt sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

Matrix congruence_kernel_basis(const std::vector<std::int64_t>& moduli,
                               const std::vector<std::vector<std::int64_t>>& g) {
  const std::size_t r = moduli.size();
  const std::size_t k = r ? g[0].size() : 0;
  // M = [g | diag(m)]; ker M projected to the first k coordinates is L.
  Matrix m = zeros(r, k + r);
  for (std::size_t t = 0; t < r; ++t) {
    for (std::size_t j = 0; j < k; ++j) m[t][j] = g[t][j];
    m[t][k + t] = moduli[t];
  }
  ColumnEchelon e = column_echelon(m);
  const std::size_t rank = e.rank();
  if (k + r - rank != k) throw std::logic_error("congruence_kernel_basis: unexpected rank");
  Matrix basis = zeros(k, k);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < k; ++i) basis[i][c] = e.u[i][rank + c];
  // U can carry huge entries; the Hermite form of the same lattice is bounded
  // by the covolume.
  return column_echelon(basis).h;
}

std::optional<std::vector<std::int64_t>> solve_modular(
    const std::vector<std::int64_t>& moduli, const std::vector<std::vector<std::int64_t>>& g,
    const std::vector<std::int64_t>& t) {
  const std::size_t r = moduli.size();
  const std::size_t k = r ? g[0].size() : 0;
  Matrix m = zeros(r, k + r);
  std::vector<BigInt> rhs(r);
  std::int64_t lcm = 1;
  for (std::size_t row = 0; row < r; ++row) {
    for (std::size_t j = 0; j < k; ++j) m[row][j] = g[row][j];
    m[row][k + row] = moduli[row];
    rhs[row] = t[row];
    lcm = std::lcm(lcm, moduli[row]);
  }
  auto x = solve(m, rhs);
  if (!x) return std::nullopt;
  std::vector<std::int64_t> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    BigInt v = (*x)[j] % lcm;
    if (v < 0) v += lcm;
    out[j] = static_cast<std::int64_t>(v);
  }
  return out;
}

}  // namespace nilcayley::intlinalg
