#include "nilcayley/lattice.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <queue>
#include <sstream>

#include "nilcayley/rng.hpp"

namespace nilcayley {

using intlinalg::BigInt;
using intlinalg::Matrix;

namespace {

constexpr int kMaxTorusDim = 6;

std::vector<std::int64_t> parse_ints(std::string_view s) {
  std::vector<std::int64_t> out;
  while (!s.empty()) {
    auto comma = s.find(',');
    auto tok = s.substr(0, comma);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw PreconditionError("malformed integer '" + std::string(tok) + "' in lattice descriptor");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::int64_t to_i64(const BigInt& v) { return static_cast<std::int64_t>(v); }

}  // namespace

// ---------------------------------------------------------------------------
// IntegerLattice

IntegerLattice lattice_from_generators(std::vector<std::int64_t> moduli,
                                       std::vector<std::vector<std::int64_t>> g) {
  if (moduli.empty() || g.size() != moduli.size() || g[0].empty())
    throw PreconditionError("lattice needs r moduli and an r x k generator matrix");
  const std::size_t r = moduli.size(), k = g[0].size();
  unsigned __int128 cov = 1;
  for (std::size_t t = 0; t < r; ++t) {
    if (moduli[t] < 2) throw PreconditionError("lattice modulus must be >= 2");
    if (g[t].size() != k) throw PreconditionError("ragged generator matrix");
    for (auto& x : g[t]) x = ((x % moduli[t]) + moduli[t]) % moduli[t];
    cov *= static_cast<unsigned __int128>(moduli[t]);
    if (cov > std::numeric_limits<std::uint64_t>::max()) throw PreconditionError("covolume overflow");
  }
  Matrix m = intlinalg::zeros(r, k + r);
  for (std::size_t t = 0; t < r; ++t) {
    for (std::size_t j = 0; j < k; ++j) m[t][j] = g[t][j];
    m[t][k + t] = moduli[t];
  }
  if (!intlinalg::spans_full_lattice(m))
    throw NotGeneratingError("generator columns do not generate the finite group");

  IntegerLattice L;
  L.k_ = static_cast<int>(k);
  L.moduli_ = std::move(moduli);
  L.g_ = std::move(g);
  L.covolume_ = static_cast<std::uint64_t>(cov);
  L.basis_ = lll_reduce(intlinalg::congruence_kernel_basis(L.moduli_, L.g_));
  BigInt det = intlinalg::determinant(L.basis_);
  if (abs(det) != BigInt(L.covolume_)) throw std::logic_error("lattice basis has the wrong determinant");
  return L;
}

IntegerLattice IntegerLattice::parse(std::string_view d) {
  if (d.substr(0, 4) != "lat:") throw PreconditionError("lattice descriptor starts with 'lat:'");
  d.remove_prefix(4);
  std::int64_t k = 0;
  std::vector<std::int64_t> mod, flat;
  while (!d.empty()) {
    auto semi = d.find(';');
    auto field = d.substr(0, semi);
    auto eq = field.find('=');
    if (eq == std::string_view::npos) throw PreconditionError("lattice field without '='");
    auto key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "k") {
      auto v = parse_ints(val);
      if (v.size() != 1) throw PreconditionError("k takes one value");
      k = v[0];
    } else if (key == "mod") {
      mod = parse_ints(val);
    } else if (key == "g") {
      flat = parse_ints(val);
    } else {
      throw PreconditionError("unknown lattice field '" + std::string(key) + "'");
    }
    if (semi == std::string_view::npos) break;
    d.remove_prefix(semi + 1);
  }
  if (k < 1 || mod.empty() || flat.size() != mod.size() * static_cast<std::size_t>(k))
    throw PreconditionError("lattice descriptor needs k, mod and an r x k matrix g");
  std::vector<std::vector<std::int64_t>> g(mod.size());
  for (std::size_t t = 0; t < mod.size(); ++t)
    g[t].assign(flat.begin() + t * k, flat.begin() + (t + 1) * k);
  return lattice_from_generators(std::move(mod), std::move(g));
}

std::string IntegerLattice::descriptor() const {
  std::ostringstream os;
  os << "lat:k=" << k_ << ";mod=";
  for (std::size_t t = 0; t < moduli_.size(); ++t) os << (t ? "," : "") << moduli_[t];
  os << ";g=";
  bool first = true;
  for (const auto& row : g_)
    for (auto x : row) {
      os << (first ? "" : ",") << x;
      first = false;
    }
  return os.str();
}

bool IntegerLattice::contains(const std::vector<std::int64_t>& x) const {
  if (static_cast<int>(x.size()) != k_) return false;
  for (std::size_t t = 0; t < moduli_.size(); ++t) {
    __int128 s = 0;
    for (int j = 0; j < k_; ++j) s += static_cast<__int128>(x[j]) * g_[t][j];
    if (s % moduli_[t] != 0) return false;
  }
  return true;
}

std::uint64_t coset_diameter_exact(const IntegerLattice& L, std::uint64_t cap) {
  const std::uint64_t n = L.covolume();
  if (n > cap) throw ResourceError("covolume " + std::to_string(n) + " above the coset BFS cap");
  const auto& m = L.moduli();
  const std::size_t r = m.size();
  // steps +-g_j encoded as residue vectors
  std::vector<std::vector<std::int64_t>> steps;
  for (int j = 0; j < L.k(); ++j) {
    std::vector<std::int64_t> plus(r), minus(r);
    for (std::size_t t = 0; t < r; ++t) {
      plus[t] = L.generators()[t][j];
      minus[t] = (m[t] - plus[t]) % m[t];
    }
    steps.push_back(plus);
    steps.push_back(minus);
  }
  auto step = [&](std::uint64_t code, const std::vector<std::int64_t>& s) {
    std::uint64_t out = 0, place = 1;
    for (std::size_t t = r; t-- > 0;) {
      const auto mt = static_cast<std::uint64_t>(m[t]);
      const std::uint64_t digit = (code / place) % mt;
      out += ((digit + static_cast<std::uint64_t>(s[t])) % mt) * place;
      place *= mt;
    }
    return out;
  };
  std::vector<bool> seen(n, false);
  std::vector<std::uint64_t> frontier{0}, next;
  seen[0] = true;
  std::uint64_t level = 0;
  while (true) {
    next.clear();
    for (auto c : frontier)
      for (const auto& s : steps) {
        const auto d = step(c, s);
        if (!seen[d]) {
          seen[d] = true;
          next.push_back(d);
        }
      }
    if (next.empty()) break;
    ++level;
    frontier.swap(next);
  }
  return level;
}

// ---------------------------------------------------------------------------
// LLL

Matrix lll_reduce(const Matrix& basis) {
  const std::size_t n = basis.size();
  if (n == 0) return basis;
  // exact integer columns, floating Gram-Schmidt
  std::vector<std::vector<BigInt>> b(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[j][i] = basis[i][j];

  std::vector<std::vector<long double>> bs(n, std::vector<long double>(n));
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n));
  std::vector<long double> norm(n);
  auto gram_schmidt = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < n; ++t) bs[i][t] = b[i][t].convert_to<long double>();
      for (std::size_t j = 0; j < i; ++j) {
        long double dot = 0;
        for (std::size_t t = 0; t < n; ++t) dot += b[i][t].convert_to<long double>() * bs[j][t];
        mu[i][j] = norm[j] > 0 ? dot / norm[j] : 0;
        for (std::size_t t = 0; t < n; ++t) bs[i][t] -= mu[i][j] * bs[j][t];
      }
      norm[i] = 0;
      for (std::size_t t = 0; t < n; ++t) norm[i] += bs[i][t] * bs[i][t];
    }
  };
  gram_schmidt();
  const long double delta = 0.99L;
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t j = k; j-- > 0;) {
      const long double r = std::nearbyint(mu[k][j]);
      if (r == 0) continue;
      // mu can exceed the int64 range on badly skewed inputs
      const BigInt q = BigInt(static_cast<long double>(r));
      for (std::size_t t = 0; t < n; ++t) b[k][t] -= q * b[j][t];
      gram_schmidt();
    }
    if (norm[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norm[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gram_schmidt();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  Matrix out = intlinalg::zeros(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = b[j][i];
  return out;
}

// ---------------------------------------------------------------------------
// RescaledLattice

RescaledLattice RescaledLattice::from_integer_basis(const Matrix& basis) {
  const std::size_t n = basis.size();
  if (n == 0 || n > static_cast<std::size_t>(kMaxTorusDim) + 2) throw PreconditionError("unsupported dimension");
  for (const auto& row : basis)
    if (row.size() != n) throw PreconditionError("basis must be square");
  BigInt det = abs(intlinalg::determinant(basis));
  if (det == 0) throw PreconditionError("basis is singular");
  RescaledLattice out;
  out.k_ = static_cast<int>(n);
  out.covolume_ = static_cast<std::uint64_t>(det);
  out.basis_ = lll_reduce(basis);
  return out;
}

double RescaledLattice::scale() const {
  return static_cast<double>(std::pow(static_cast<long double>(covolume_), -1.0L / k_));
}

std::vector<std::vector<double>> RescaledLattice::real_basis() const {
  const long double s = std::pow(static_cast<long double>(covolume_), -1.0L / k_);
  std::vector<std::vector<double>> cols(k_, std::vector<double>(k_));
  for (int j = 0; j < k_; ++j)
    for (int i = 0; i < k_; ++i) cols[j][i] = static_cast<double>(s * static_cast<long double>(to_i64(basis_[i][j])));
  return cols;
}

bool RescaledLattice::unimodular_exact() const {
  return abs(intlinalg::determinant(basis_)) == BigInt(covolume_);
}

RescaledLattice rescale(const IntegerLattice& L) { return RescaledLattice::from_integer_basis(L.basis()); }

// ---------------------------------------------------------------------------
// l1 distance and covering radius

namespace {

// Nearest lattice point in l1 by Fincke-Pohst enumeration in l2: any point
// closer than the current best in l1 is also closer in l2, so the running l1
// best is a valid l2 pruning radius.
class NearestL1 {
 public:
  explicit NearestL1(const RescaledLattice& L) : k_(L.k()), cols_(L.real_basis()) {
    bs_.assign(k_, std::vector<double>(k_));
    mu_.assign(k_, std::vector<double>(k_, 0));
    norm_.assign(k_, 0);
    for (int i = 0; i < k_; ++i) {
      bs_[i] = cols_[i];
      for (int j = 0; j < i; ++j) {
        double dot = 0;
        for (int t = 0; t < k_; ++t) dot += cols_[i][t] * bs_[j][t];
        mu_[i][j] = dot / norm_[j];
        for (int t = 0; t < k_; ++t) bs_[i][t] -= mu_[i][j] * bs_[j][t];
      }
      for (int t = 0; t < k_; ++t) norm_[i] += bs_[i][t] * bs_[i][t];
    }
  }

  int k() const { return k_; }
  const std::vector<std::vector<double>>& columns() const { return cols_; }

  double operator()(const double* x) const {
    // GS coordinates of x
    std::array<double, 8> y{};
    {
      std::array<double, 8> rest{};
      for (int t = 0; t < k_; ++t) rest[t] = x[t];
      for (int i = k_ - 1; i >= 0; --i) {
        double dot = 0;
        for (int t = 0; t < k_; ++t) dot += rest[t] * bs_[i][t];
        y[i] = dot / norm_[i];
      }
    }
    // Babai nearest plane for the starting radius
    std::array<std::int64_t, 8> z{};
    for (int i = k_ - 1; i >= 0; --i) {
      double c = y[i];
      for (int j = i + 1; j < k_; ++j) c -= mu_[j][i] * static_cast<double>(z[j]);
      z[i] = static_cast<std::int64_t>(std::llround(c));
    }
    best_ = l1(x, z);
    enumerate(x, y, z, k_ - 1, 0.0);
    return best_;
  }

 private:
  double l1(const double* x, const std::array<std::int64_t, 8>& z) const {
    double s = 0;
    for (int t = 0; t < k_; ++t) {
      double v = x[t];
      for (int j = 0; j < k_; ++j) v -= cols_[j][t] * static_cast<double>(z[j]);
      s += std::fabs(v);
    }
    return s;
  }

  void enumerate(const double* x, const std::array<double, 8>& y, std::array<std::int64_t, 8>& z, int i,
                 double partial) const {
    double c = y[i];
    for (int j = i + 1; j < k_; ++j) c -= mu_[j][i] * static_cast<double>(z[j]);
    const double room = best_ * best_ - partial;
    if (room < 0) return;
    const double half = std::sqrt(room / norm_[i]);
    const auto lo = static_cast<std::int64_t>(std::ceil(c - half));
    const auto hi = static_cast<std::int64_t>(std::floor(c + half));
    for (std::int64_t zi = lo; zi <= hi; ++zi) {
      const double d = (c - static_cast<double>(zi));
      const double p = partial + d * d * norm_[i];
      if (p > best_ * best_) continue;
      z[i] = zi;
      if (i == 0) {
        best_ = std::min(best_, l1(x, z));
      } else {
        enumerate(x, y, z, i - 1, p);
      }
    }
  }

  int k_;
  std::vector<std::vector<double>> cols_;
  std::vector<std::vector<double>> bs_;
  std::vector<std::vector<double>> mu_;
  std::vector<double> norm_;
  mutable double best_ = 0;
};

struct Cell {
  std::array<double, kMaxTorusDim> lo{}, hi{};
  double value = 0;  // distance at the centre
  double upper = 0;  // value + l1 radius of the cell
  bool operator<(const Cell& o) const { return upper < o.upper; }
};

}  // namespace

double l1_distance_to_lattice(const RescaledLattice& L, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != L.k()) throw PreconditionError("point dimension mismatch");
  return NearestL1(L)(x.data());
}

Enclosure torus_diameter_l1(const RescaledLattice& L, double eps, const TorusOptions& opts) {
  const int k = L.k();
  if (k > kMaxTorusDim) throw PreconditionError("torus_diameter_l1 supports k <= 6");
  if (!(eps > 0)) throw PreconditionError("eps must be positive");
  const NearestL1 nearest(L);
  const auto& cols = nearest.columns();
  std::array<double, kMaxTorusDim> col_l1{};
  for (int j = 0; j < k; ++j)
    for (int t = 0; t < k; ++t) col_l1[j] += std::fabs(cols[j][t]);

  Enclosure enc;
  auto evaluate = [&](Cell& c) {
    std::array<double, kMaxTorusDim> x{};
    double radius = 0;
    for (int j = 0; j < k; ++j) {
      const double mid = 0.5 * (c.lo[j] + c.hi[j]);
      for (int t = 0; t < k; ++t) x[t] += cols[j][t] * mid;
      radius += 0.5 * (c.hi[j] - c.lo[j]) * col_l1[j];
    }
    c.value = nearest(x.data());
    c.upper = c.value + radius;
    ++enc.evaluations;
  };

  std::priority_queue<Cell> heap;
  double best = 0, dropped = 0;
  const int initial = 2;
  int total = 1;
  for (int j = 0; j < k; ++j) total *= initial;
  for (int idx = 0; idx < total; ++idx) {
    Cell c;
    int rest = idx;
    for (int j = 0; j < k; ++j) {
      const int s = rest % initial;
      rest /= initial;
      c.lo[j] = static_cast<double>(s) / initial;
      c.hi[j] = static_cast<double>(s + 1) / initial;
    }
    evaluate(c);
    best = std::max(best, c.value);
    heap.push(c);
  }

  auto finish = [&](double hi) {
    // outward rounding for the floating-point evaluation
    enc.lo = best * (1 - 1e-12) - 1e-12;
    enc.hi = hi * (1 + 1e-12) + 1e-12;
    return enc;
  };

  while (true) {
    const double top = heap.empty() ? best : heap.top().upper;
    const double hi = std::max(top, dropped);
    if (hi - best <= eps || heap.empty()) return finish(std::max(hi, best));
    if (enc.evaluations >= opts.max_evaluations)
      throw BudgetError("torus_diameter_l1: evaluation budget exhausted", finish(std::max(hi, best)));
    Cell c = heap.top();
    heap.pop();
    int split = 0;
    double widest = -1;
    for (int j = 0; j < k; ++j) {
      const double w = (c.hi[j] - c.lo[j]) * col_l1[j];
      if (w > widest) {
        widest = w;
        split = j;
      }
    }
    const double mid = 0.5 * (c.lo[split] + c.hi[split]);
    Cell a = c, b = c;
    a.hi[split] = mid;
    b.lo[split] = mid;
    for (Cell* child : {&a, &b}) {
      evaluate(*child);
      best = std::max(best, child->value);
      if (child->upper <= best + eps)
        dropped = std::max(dropped, child->upper);
      else
        heap.push(*child);
    }
  }
}

RescaledLattice sample_haar_proxy(int k, std::int64_t q, std::mt19937_64& rng) {
  if (k < 2) throw PreconditionError("Haar proxy needs k >= 2");
  if (q < 2) throw PreconditionError("Haar proxy needs q >= 2");
  while (true) {
    std::vector<std::int64_t> row(k);
    for (auto& x : row) x = static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(q)));
    try {
      return rescale(lattice_from_generators({q}, {row}));
    } catch (const NotGeneratingError&) {
      // measure-zero draw at prime q; redraw
    }
  }
}

}  // namespace nilcayley
