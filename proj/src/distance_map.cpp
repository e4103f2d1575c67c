#include <bit>
#include <cstring>
#include <fstream>

#include "nilcayley/cayley.hpp"
#include "nilcayley/errors.hpp"

namespace nilcayley {

namespace {

constexpr std::uint16_t kMagic = 0x4E43;  // "CN" little-endian

std::string run_descriptor(const GroupSpec& spec, const GeneratingSet& gens) {
  std::string s = spec.descriptor() + "|";
  for (std::size_t i = 0; i < gens.positives().size(); ++i)
    s += (i ? "," : "") + std::to_string(gens.positives()[i]);
  return s;
}

std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw PreconditionError("truncated distance map header");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

std::uint32_t descriptor_hash(const GroupSpec& spec) { return fnv1a(spec.descriptor()); }

DistanceMap::DistanceMap(GroupSpec spec, GeneratingSet gens, int cell_width)
    : spec_(std::move(spec)), gens_(std::move(gens)), width_(cell_width) {
  if (width_ != 1 && width_ != 2 && width_ != 4) throw PreconditionError("cell width must be 1, 2 or 4");
  sentinel_ = width_ == 4 ? 0xFFFFFFFFu : (1u << (8 * width_)) - 1;
  cells_.assign(static_cast<std::size_t>(spec_.order()) * width_, 0xFF);
}

bool DistanceMap::complete() const {
  for (Code g = 0; g < size(); ++g)
    if ((*this)[g] == kUnreached) return false;
  return true;
}

void DistanceMap::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ResourceError("cannot open " + path.string() + " for writing");
  put_le<std::uint16_t>(os, kMagic);
  put_le<std::uint16_t>(os, static_cast<std::uint16_t>(width_));
  put_le<std::uint32_t>(os, fnv1a(run_descriptor(spec_, gens_)));
  put_le<std::uint64_t>(os, size());
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(cells_.data()), static_cast<std::streamsize>(cells_.size()));
  } else {
    for (Code g = 0; g < size(); ++g) {
      const std::uint32_t v = (*this)[g] == kUnreached ? sentinel_ : (*this)[g];
      for (int b = 0; b < width_; ++b) os.put(static_cast<char>(v >> (8 * b)));
    }
  }
  if (!os) throw ResourceError("failed writing " + path.string());
}

DistanceMap DistanceMap::load(const std::filesystem::path& path, const GroupSpec& spec,
                              const GeneratingSet& gens) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("cannot open " + path.string());
  if (get_le<std::uint16_t>(is) != kMagic) throw PreconditionError("not a distance map file");
  const int width = get_le<std::uint16_t>(is);
  const auto hash = get_le<std::uint32_t>(is);
  const auto length = get_le<std::uint64_t>(is);
  if (hash != fnv1a(run_descriptor(spec, gens)) || length != spec.order())
    throw PreconditionError("distance map file was written for a different group or generating set");
  DistanceMap dm(spec, gens, width);
  is.read(reinterpret_cast<char*>(dm.cells_.data()), static_cast<std::streamsize>(dm.cells_.size()));
  if (!is) throw PreconditionError("truncated distance map body");
  if constexpr (std::endian::native != std::endian::little) {
    for (Code g = 0; g < length; ++g) {
      std::uint32_t v = 0;
      for (int b = 0; b < width; ++b) v |= std::uint32_t{dm.cells_[g * width + b]} << (8 * b);
      dm.set(g, v);
    }
  }
  return dm;
}

}  // namespace nilcayley
