#include "nilcayley/word.hpp"

#include <charconv>
#include <sstream>

#include "nilcayley/errors.hpp"

namespace nilcayley {

Word Word::parse(std::string_view text) {
  Word w;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n')) ++pos;
    if (pos == text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t' && text[end] != '\n') ++end;
    std::string_view tok = text.substr(pos, end - pos);
    if (tok.size() < 2 || (tok[0] != '+' && tok[0] != '-'))
      throw PreconditionError("malformed word token '" + std::string(tok) + "'");
    int idx = 0;
    auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || idx < 0)
      throw PreconditionError("malformed word token '" + std::string(tok) + "'");
    w.push_back({idx, tok[0] == '-'});
    pos = end;
  }
  return w;
}

std::string Word::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < letters_.size(); ++i)
    os << (i ? " " : "") << (letters_[i].inverse ? '-' : '+') << letters_[i].gen;
  return os.str();
}

Word& Word::operator+=(const Word& o) {
  letters_.insert(letters_.end(), o.letters_.begin(), o.letters_.end());
  return *this;
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (auto& l : out) l.inverse = !l.inverse;
  return Word(std::move(out));
}

Word Word::repeated(std::int64_t n) const {
  Word out;
  for (std::int64_t i = 0; i < n; ++i) out += *this;
  return out;
}

Word commutator_word(const Word& a, const Word& b) { return a + b + a.inverse() + b.inverse(); }

Code word_eval(const GroupSpec& spec, const GeneratingSet& gens, const Word& w) {
  Entries acc{}, next{};
  std::vector<Entries> pos, neg;
  pos.reserve(gens.k());
  neg.reserve(gens.k());
  for (int g = 0; g < gens.k(); ++g) {
    pos.push_back(spec.decode(gens.element({g, false})));
    neg.push_back(spec.decode(gens.element({g, true})));
  }
  for (const auto& l : w.letters()) {
    if (l.gen < 0 || l.gen >= gens.k())
      throw InvalidElementError("word letter " + std::to_string(l.gen) + " out of range");
    spec.mul_entries(acc, l.inverse ? neg[l.gen] : pos[l.gen], next);
    acc = next;
  }
  return spec.encode(acc);
}

}  // namespace nilcayley
