#include "nilcayley/group.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "nilcayley/errors.hpp"
#include "nilcayley/intlinalg.hpp"

namespace nilcayley {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) {
  a %= m;
  return a < 0 ? a + m : a;
}

std::int64_t parse_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw PreconditionError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

std::vector<std::int64_t> parse_list(std::string_view s, std::string_view what) {
  std::vector<std::int64_t> out;
  while (!s.empty()) {
    auto comma = s.find(',');
    out.push_back(parse_int(s.substr(0, comma), what));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

GroupSpec GroupSpec::abelian(std::vector<std::int64_t> moduli) {
  if (moduli.empty()) throw PreconditionError("abelian spec needs at least one modulus");
  if (static_cast<int>(moduli.size()) > kMaxEntries)
    throw PreconditionError("too many cyclic factors");
  for (auto m : moduli)
    if (m < 2 || m > kMaxModulus) throw PreconditionError("abelian modulus out of range");
  GroupSpec s;
  s.family_ = Family::abelian;
  s.radices_ = std::move(moduli);
  s.layer_.assign(s.radices_.size(), 1);
  s.rows_.assign(s.radices_.size(), -1);
  s.cols_.assign(s.radices_.size(), -1);
  s.class_ = 1;
  s.finish();
  return s;
}

GroupSpec GroupSpec::unitriangular(std::int64_t q, int d) {
  if (q < 2 || q > kMaxModulus) throw PreconditionError("unitriangular modulus out of range");
  if (d < 2 || d > kMaxDimension) throw PreconditionError("unitriangular dimension out of range");
  GroupSpec s;
  s.family_ = Family::unitriangular;
  s.q_ = q;
  s.d_ = d;
  s.class_ = d - 1;
  for (auto& row : s.index_) row.fill(-1);
  for (int diag = 1; diag < d; ++diag) {
    for (int row = 0; row + diag < d; ++row) {
      s.index_[row][row + diag] = static_cast<std::int8_t>(s.radices_.size());
      s.radices_.push_back(q);
      s.layer_.push_back(diag);
      s.rows_.push_back(row);
      s.cols_.push_back(row + diag);
    }
  }
  s.finish();
  return s;
}

void GroupSpec::finish() {
  unsigned __int128 total = 1;
  for (auto r : radices_) {
    total *= static_cast<unsigned __int128>(r);
    if (total > (static_cast<unsigned __int128>(1) << 62))
      throw PreconditionError("group order exceeds the supported 2^62");
  }
  order_ = static_cast<Code>(total);
  subgroup_orders_.assign(class_ + 2, 1);
  for (int i = 1; i <= class_ + 1; ++i) {
    Code prod = 1;
    for (int e = 0; e < entry_count(); ++e)
      if (layer_[e] >= i) prod *= static_cast<Code>(radices_[e]);
    subgroup_orders_[i] = prod;
  }
}

GroupSpec GroupSpec::parse(std::string_view descriptor) {
  auto colon = descriptor.find(':');
  if (colon == std::string_view::npos)
    throw PreconditionError("group descriptor needs a family prefix: '" + std::string(descriptor) + "'");
  auto family = descriptor.substr(0, colon);
  auto body = descriptor.substr(colon + 1);
  if (family == "abelian") return abelian(parse_list(body, "abelian moduli"));
  if (family == "ut") {
    auto v = parse_list(body, "ut parameters");
    if (v.size() != 2) throw PreconditionError("ut descriptor is 'ut:q,d'");
    return unitriangular(v[0], static_cast<int>(v[1]));
  }
  throw PreconditionError("unknown group family '" + std::string(family) + "'");
}

std::string GroupSpec::descriptor() const {
  std::ostringstream os;
  if (family_ == Family::unitriangular) {
    os << "ut:" << q_ << "," << d_;
  } else {
    os << "abelian:";
    for (std::size_t i = 0; i < radices_.size(); ++i) os << (i ? "," : "") << radices_[i];
  }
  return os.str();
}

int GroupSpec::rank() const noexcept {
  return family_ == Family::unitriangular ? d_ - 1 : entry_count();
}

Code GroupSpec::subgroup_order(int i) const {
  if (i < 1) throw PreconditionError("lower central series index starts at 1");
  if (i > class_ + 1) return 1;
  return subgroup_orders_[i];
}

GroupSpec GroupSpec::layer_spec(int i) const {
  if (i < 1 || i > class_) throw PreconditionError("layer index out of range");
  std::vector<std::int64_t> m;
  for (int e = 0; e < entry_count(); ++e)
    if (layer_[e] == i) m.push_back(radices_[e]);
  return abelian(std::move(m));
}

GroupSpec GroupSpec::abelianisation() const { return layer_spec(1); }

int GroupSpec::entry_index(int row, int col) const {
  if (family_ != Family::unitriangular || row < 0 || col >= d_ || row >= col)
    throw PreconditionError("no such matrix entry");
  return index_[row][col];
}

Entries GroupSpec::decode(Code c) const {
  Entries v{};
  for (int e = entry_count() - 1; e >= 0; --e) {
    const auto r = static_cast<Code>(radices_[e]);
    v[e] = static_cast<std::int64_t>(c % r);
    c /= r;
  }
  return v;
}

Code GroupSpec::encode(const Entries& v) const {
  Code c = 0;
  for (int e = 0; e < entry_count(); ++e)
    c = c * static_cast<Code>(radices_[e]) + static_cast<Code>(mod(v[e], radices_[e]));
  return c;
}

void GroupSpec::mul_entries(const Entries& a, const Entries& b, Entries& out) const {
  const int n = entry_count();
  if (family_ == Family::abelian) {
    for (int e = 0; e < n; ++e) {
      auto s = a[e] + b[e];
      out[e] = s >= radices_[e] ? s - radices_[e] : s;
    }
    return;
  }
  // (ab)_{ij} = a_ij + b_ij + sum_{i<l<j} a_il b_lj
  for (int e = 0; e < n; ++e) {
    const int i = rows_[e], j = cols_[e];
    std::int64_t s = a[e] + b[e];
    for (int l = i + 1; l < j; ++l) s = (s + a[index_[i][l]] * b[index_[l][j]]) % q_;
    out[e] = s % q_;
  }
}

void GroupSpec::inv_entries(const Entries& a, Entries& out) const {
  const int n = entry_count();
  if (family_ == Family::abelian) {
    for (int e = 0; e < n; ++e) out[e] = a[e] == 0 ? 0 : radices_[e] - a[e];
    return;
  }
  // Entries are ordered by superdiagonal, so every b_lj used below is known.
  for (int e = 0; e < n; ++e) {
    const int i = rows_[e], j = cols_[e];
    std::int64_t s = a[e];
    for (int l = i + 1; l < j; ++l) s = (s + a[index_[i][l]] * out[index_[l][j]]) % q_;
    out[e] = s == 0 ? 0 : q_ - s;
  }
}

void require_element(const GroupSpec& spec, Code a) {
  if (!spec.contains(a))
    throw InvalidElementError("element code " + std::to_string(a) + " outside " + spec.descriptor());
}

Code mul(const GroupSpec& spec, Code a, Code b) {
  require_element(spec, a);
  require_element(spec, b);
  Entries out{};
  spec.mul_entries(spec.decode(a), spec.decode(b), out);
  return spec.encode(out);
}

Code inv(const GroupSpec& spec, Code a) {
  require_element(spec, a);
  Entries out{};
  spec.inv_entries(spec.decode(a), out);
  return spec.encode(out);
}

Code commutator(const GroupSpec& spec, Code x, Code y) {
  return mul(spec, mul(spec, x, y), mul(spec, inv(spec, x), inv(spec, y)));
}

Code power(const GroupSpec& spec, Code a, std::int64_t n) {
  require_element(spec, a);
  Code base = n < 0 ? inv(spec, a) : a;
  std::uint64_t e = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  Code acc = 0;
  while (e) {
    if (e & 1) acc = mul(spec, acc, base);
    base = mul(spec, base, base);
    e >>= 1;
  }
  return acc;
}

Code abelianise(const GroupSpec& spec, Code a) {
  require_element(spec, a);
  return a / spec.subgroup_order(2);
}

Code canonical_lift(const GroupSpec& spec, Code ab) {
  if (ab >= spec.layer_order(1)) throw InvalidElementError("abelianised code out of range");
  return ab * spec.subgroup_order(2);
}

bool lcs_member(const GroupSpec& spec, int i, Code a) {
  require_element(spec, a);
  return a < spec.subgroup_order(i);
}

Code layer_key(const GroupSpec& spec, int i, Code a) {
  require_element(spec, a);
  return (a % spec.subgroup_order(i)) / spec.subgroup_order(i + 1);
}

bool generates(const GroupSpec& spec, std::span<const Code> gens) {
  if (gens.empty()) throw PreconditionError("generates() needs a nonempty list");
  const GroupSpec ab = spec.abelianisation();
  const auto& moduli = ab.radices();
  const std::size_t r = moduli.size();
  intlinalg::Matrix m = intlinalg::zeros(r, gens.size() + r);
  for (std::size_t j = 0; j < gens.size(); ++j) {
    Entries v = ab.decode(abelianise(spec, gens[j]));
    for (std::size_t t = 0; t < r; ++t) m[t][j] = v[t];
  }
  for (std::size_t t = 0; t < r; ++t) m[t][gens.size() + t] = moduli[t];
  return intlinalg::spans_full_lattice(m);
}

std::vector<std::int64_t> multilinear_layer_map(const GroupSpec& spec, int i,
                                                std::span<const Code> ab_tuple) {
  if (i < 1 || i > spec.nilpotency_class())
    throw PreconditionError("layer index out of range for multilinear_layer_map");
  if (static_cast<int>(ab_tuple.size()) != i)
    throw PreconditionError("multilinear_layer_map needs exactly i entries");
  Code acc = canonical_lift(spec, ab_tuple[i - 1]);
  for (int j = i - 2; j >= 0; --j) acc = commutator(spec, canonical_lift(spec, ab_tuple[j]), acc);
  const GroupSpec layer = spec.layer_spec(i);
  Entries digits = layer.decode(layer_key(spec, i, acc));
  return {digits.begin(), digits.begin() + layer.entry_count()};
}

GeneratingSet::GeneratingSet(const GroupSpec& spec, std::vector<Code> positives)
    : positives_(std::move(positives)) {
  if (positives_.empty()) throw PreconditionError("generating set needs k >= 1");
  inverses_.reserve(positives_.size());
  for (Code z : positives_) inverses_.push_back(inv(spec, z));
  for (int g = 0; g < k(); ++g) {
    for (bool inverse : {false, true}) {
      Code e = inverse ? inverses_[g] : positives_[g];
      if (e == 0) continue;
      if (std::find(symmetric_.begin(), symmetric_.end(), e) != symmetric_.end()) continue;
      symmetric_.push_back(e);
      letters_.push_back({g, inverse});
    }
  }
}

GeneratingSet GeneratingSet::abelianised(const GroupSpec& spec) const {
  std::vector<Code> p;
  p.reserve(positives_.size());
  for (Code z : positives_) p.push_back(abelianise(spec, z));
  return GeneratingSet(spec.abelianisation(), std::move(p));
}

}  // namespace nilcayley
