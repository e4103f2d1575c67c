#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nilcayley {

/// Dense index of a group element in [0, |G|).
using Code = std::uint64_t;

inline constexpr int kMaxEntries = 28;       // d <= 8 gives 28 upper entries
inline constexpr int kMaxDimension = 8;
inline constexpr std::int64_t kMaxModulus = (std::int64_t{1} << 31) - 1;

/// Entry vector of an element. Only the first GroupSpec::entry_count() slots
/// are meaningful; the rest stay zero.
using Entries = std::array<std::int64_t, kMaxEntries>;

/// A concrete finite nilpotent group: a product of cyclic groups, or the
/// unitriangular group H_{q,d} of d x d upper unitriangular matrices mod q.
///
/// Elements are stored as mixed-radix codes over an entry vector. For
/// unitriangular groups the entries are the strictly upper triangular
/// coefficients, listed superdiagonal by superdiagonal (first superdiagonal
/// first, left to right inside each). The first entry is the most significant
/// digit, so that
///   - the abelianisation is the leading block of digits (the first
///     superdiagonal),
///   - G^(i) is exactly the set of codes below |G^(i)|,
///   - the last entry (the (1,d) corner, or the last cyclic factor) is the
///     least significant digit and is central.
class GroupSpec {
 public:
  enum class Family { abelian, unitriangular };

  static GroupSpec abelian(std::vector<std::int64_t> moduli);
  static GroupSpec unitriangular(std::int64_t q, int d);

  /// Parses "abelian:m1,m2,..." or "ut:q,d".
  static GroupSpec parse(std::string_view descriptor);
  std::string descriptor() const;

  Family family() const noexcept { return family_; }
  bool is_unitriangular() const noexcept { return family_ == Family::unitriangular; }

  /// q for H_{q,d}.
  std::int64_t modulus() const noexcept { return q_; }
  /// d for H_{q,d}.
  int dimension() const noexcept { return d_; }
  /// Cyclic factor orders; for H_{q,d} these are the radices of all entries.
  const std::vector<std::int64_t>& radices() const noexcept { return radices_; }

  int entry_count() const noexcept { return static_cast<int>(radices_.size()); }
  std::int64_t radix(int e) const { return radices_[e]; }
  /// Lower-central-series layer an entry lives on (its superdiagonal).
  int layer_of_entry(int e) const { return layer_[e]; }

  Code order() const noexcept { return order_; }
  int rank() const noexcept;
  int nilpotency_class() const noexcept { return class_; }

  /// |G^(i)| for i >= 1; equals 1 once i > class.
  Code subgroup_order(int i) const;
  /// |G^(i) / G^(i+1)|.
  Code layer_order(int i) const { return subgroup_order(i) / subgroup_order(i + 1); }
  /// Spec of the layer G^(i)/G^(i+1) as an abelian group.
  GroupSpec layer_spec(int i) const;

  GroupSpec abelianisation() const;

  /// Position of matrix entry (row, col), 0-based with row < col.
  int entry_index(int row, int col) const;
  int entry_row(int e) const { return rows_[e]; }
  int entry_col(int e) const { return cols_[e]; }

  bool contains(Code c) const noexcept { return c < order_; }
  Entries decode(Code c) const;
  Code encode(const Entries& v) const;

  void mul_entries(const Entries& a, const Entries& b, Entries& out) const;
  void inv_entries(const Entries& a, Entries& out) const;

  bool operator==(const GroupSpec& o) const {
    return family_ == o.family_ && radices_ == o.radices_ && d_ == o.d_;
  }

 private:
  GroupSpec() = default;
  void finish();

  Family family_ = Family::abelian;
  std::int64_t q_ = 0;
  int d_ = 0;
  int class_ = 1;
  std::vector<std::int64_t> radices_;
  std::vector<int> layer_;
  std::vector<int> rows_, cols_;
  std::array<std::array<std::int8_t, kMaxDimension>, kMaxDimension> index_{};
  Code order_ = 1;
  std::vector<Code> subgroup_orders_;  // index i -> |G^(i)|, i in [1, class+1]
};

void require_element(const GroupSpec& spec, Code a);

Code mul(const GroupSpec& spec, Code a, Code b);
Code inv(const GroupSpec& spec, Code a);
/// [x, y] = x y x^-1 y^-1.
Code commutator(const GroupSpec& spec, Code x, Code y);
Code power(const GroupSpec& spec, Code a, std::int64_t n);

/// Projection onto spec.abelianisation() (leading digits).
Code abelianise(const GroupSpec& spec, Code a);
/// Lift of an abelianised element with every deeper entry set to zero.
Code canonical_lift(const GroupSpec& spec, Code ab);

/// True iff a lies in the i-th term of the lower central series.
bool lcs_member(const GroupSpec& spec, int i, Code a);

/// Coset key of a member of G^(i) modulo G^(i+1): the layer-i digits read as a
/// code of spec.layer_spec(i).
Code layer_key(const GroupSpec& spec, int i, Code a);

/// True iff the symmetric closure of gens generates the whole group. Uses the
/// nilpotent criterion: generation of G is equivalent to generation of G^ab.
bool generates(const GroupSpec& spec, std::span<const Code> gens);

/// Class of the right-nested commutator [g_1, [g_2, ..., [g_{i-1}, g_i]...]]
/// in G^(i)/G^(i+1), where the g_j are canonical lifts of abelianised
/// elements. Returned as layer digits (superdiagonal i for H_{q,d}).
std::vector<std::int64_t> multilinear_layer_map(const GroupSpec& spec, int i,
                                                std::span<const Code> ab_tuple);

/// A generating tuple z_1..z_k together with its symmetric closure
/// S = {z_j^{+1}, z_j^{-1}}, deduplicated and with the identity dropped
/// (identity letters only add self-loops to the Cayley graph).
class GeneratingSet {
 public:
  struct Letter {
    int gen;       // index into positives()
    bool inverse;  // z_gen^-1 instead of z_gen
    bool operator==(const Letter&) const = default;
  };

  GeneratingSet(const GroupSpec& spec, std::vector<Code> positives);

  int k() const noexcept { return static_cast<int>(positives_.size()); }
  const std::vector<Code>& positives() const noexcept { return positives_; }
  /// Neighbor list of the Cayley graph, closed under inversion.
  const std::vector<Code>& symmetric() const noexcept { return symmetric_; }
  /// letters()[j] spells symmetric()[j].
  const std::vector<Letter>& letters() const noexcept { return letters_; }
  /// Element spelled by a letter (also valid for letters dropped from S).
  Code element(Letter l) const { return l.inverse ? inverses_[l.gen] : positives_[l.gen]; }

  /// Same tuple pushed to the abelianisation, letter indices preserved.
  GeneratingSet abelianised(const GroupSpec& spec) const;

 private:
  std::vector<Code> positives_;
  std::vector<Code> inverses_;
  std::vector<Code> symmetric_;
  std::vector<Letter> letters_;
};

}  // namespace nilcayley
