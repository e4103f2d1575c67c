#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nilcayley/group.hpp"

namespace nilcayley {

/// A word in the generators: letters are signed indices into
/// GeneratingSet::positives(). Text form is "+0 +1 -0 -1".
class Word {
 public:
  using Letter = GeneratingSet::Letter;

  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  static Word parse(std::string_view text);
  std::string to_string() const;

  std::size_t length() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  const std::vector<Letter>& letters() const noexcept { return letters_; }

  void push_back(Letter l) { letters_.push_back(l); }
  Word& operator+=(const Word& o);
  friend Word operator+(Word a, const Word& b) { return a += b; }

  /// Reversed with every sign flipped; evaluates to the inverse element.
  Word inverse() const;
  /// The word concatenated with itself n times.
  Word repeated(std::int64_t n) const;

  bool operator==(const Word&) const = default;

 private:
  std::vector<Letter> letters_;
};

/// Commutator word [a, b] = a b a^-1 b^-1, emitted literally.
Word commutator_word(const Word& a, const Word& b);

/// Left-to-right product of the letters.
Code word_eval(const GroupSpec& spec, const GeneratingSet& gens, const Word& w);

}  // namespace nilcayley
