#include "cifs/contraction.hpp"

#include <string>

#include "cifs/error.hpp"

namespace cifs {

MapDescriptor::MapDescriptor(Rational ratio, std::vector<Rational> translation)
    : ratio_(std::move(ratio)), translation_(std::move(translation)) {
  if (translation_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "map dimension must be positive");
  }
  ratio_.canonicalize();
  for (auto& b : translation_) b.canonicalize();
  if (abs(ratio_) >= 1) {
    throw Error(ErrorCode::kNotContraction,
                "|ratio| = " + to_string(abs(ratio_)) + " is not < 1");
  }
}

std::vector<Rational> MapDescriptor::apply(std::span<const Rational> x) const {
  if (x.size() != dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "point dimension does not match map");
  }
  std::vector<Rational> out(dimension());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = ratio_ * x[j] + translation_[j];
  return out;
}

AffineMap MapDescriptor::to_float() const {
  std::vector<double> b(translation_.size());
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = to_double(translation_[j]);
  return AffineMap(to_double(ratio_), std::move(b));
}

void AffineMap::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t j = 0; j < translation_.size(); ++j) out[j] = ratio_ * x[j] + translation_[j];
}

std::vector<double> AffineMap::apply(std::span<const double> x) const {
  std::vector<double> out(dimension());
  apply(x, out);
  return out;
}

CompositionWord::CompositionWord(std::vector<std::uint64_t> indices)
    : indices_(std::move(indices)) {
  if (indices_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "composition word must be nonempty");
  }
  for (auto i : indices_) {
    if (i == 0) throw Error(ErrorCode::kInvalidArgument, "word indices start at 1");
  }
}

std::vector<Rational> fixed_point(const MapDescriptor& map) {
  Rational scale = 1 - map.ratio();
  std::vector<Rational> x(map.dimension());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = map.translation()[j] / scale;
  return x;
}

std::vector<double> fixed_point(const AffineMap& map) {
  double scale = 1.0 - map.ratio();
  std::vector<double> x(map.dimension());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = map.translation()[j] / scale;
  return x;
}

MapDescriptor compose(const MapDescriptor& outer, const MapDescriptor& inner) {
  if (outer.dimension() != inner.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot compose maps of different dimension");
  }
  std::vector<Rational> b(outer.dimension());
  for (std::size_t j = 0; j < b.size(); ++j) {
    b[j] = outer.ratio() * inner.translation()[j] + outer.translation()[j];
  }
  return MapDescriptor(outer.ratio() * inner.ratio(), std::move(b));
}

AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
  if (outer.dimension() != inner.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot compose maps of different dimension");
  }
  std::vector<double> b(outer.dimension());
  for (std::size_t j = 0; j < b.size(); ++j) {
    b[j] = outer.ratio() * inner.translation()[j] + outer.translation()[j];
  }
  return AffineMap(outer.ratio() * inner.ratio(), std::move(b));
}

MapDescriptor power_compose(const MapDescriptor& map, unsigned k) {
  if (k == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "power_compose needs k >= 1 (the identity is not a contraction)");
  }
  MapDescriptor result = map;
  for (unsigned step = 1; step < k; ++step) result = compose(result, map);
  return result;
}

MapDescriptor compose_word(std::span<const MapDescriptor> alphabet,
                           const CompositionWord& word) {
  auto letter = [&](std::uint64_t i) -> const MapDescriptor& {
    if (i > alphabet.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "word index " + std::to_string(i) + " outside alphabet of size " +
                      std::to_string(alphabet.size()));
    }
    return alphabet[i - 1];
  };
  MapDescriptor result = letter(word[word.length() - 1]);
  for (std::size_t k = word.length() - 1; k-- > 0;) result = compose(letter(word[k]), result);
  return result;
}

}  // namespace cifs
