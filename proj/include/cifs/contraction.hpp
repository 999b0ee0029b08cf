#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "cifs/rational.hpp"

namespace cifs {

class AffineMap;

/// A contracting similarity x -> ratio * x + translation on R^d, held in
/// exact rationals. The ratio is signed so decreasing maps of the line are
/// representable; construction enforces |ratio| < 1.
class MapDescriptor {
 public:
  MapDescriptor(Rational ratio, std::vector<Rational> translation);

  std::size_t dimension() const noexcept { return translation_.size(); }
  const Rational& ratio() const noexcept { return ratio_; }
  std::span<const Rational> translation() const noexcept { return translation_; }

  std::vector<Rational> apply(std::span<const Rational> x) const;

  // Double-precision projection for geometry.
  AffineMap to_float() const;

  friend bool operator==(const MapDescriptor&, const MapDescriptor&) = default;

 private:
  Rational ratio_;
  std::vector<Rational> translation_;
};

/// Double-precision counterpart of MapDescriptor. No contraction check: it
/// is only ever produced from a validated descriptor or by composing two.
class AffineMap {
 public:
  AffineMap(double ratio, std::vector<double> translation)
      : ratio_(ratio), translation_(std::move(translation)) {}

  std::size_t dimension() const noexcept { return translation_.size(); }
  double ratio() const noexcept { return ratio_; }
  std::span<const double> translation() const noexcept { return translation_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;

 private:
  double ratio_;
  std::vector<double> translation_;
};

/// Finite index sequence (i_1, ..., i_k), all indices >= 1, k >= 1. Denotes
/// F_{i_1} o ... o F_{i_k}.
class CompositionWord {
 public:
  CompositionWord(std::vector<std::uint64_t> indices);
  CompositionWord(std::initializer_list<std::uint64_t> indices)
      : CompositionWord(std::vector<std::uint64_t>(indices)) {}

  std::size_t length() const noexcept { return indices_.size(); }
  std::span<const std::uint64_t> indices() const noexcept { return indices_; }
  std::uint64_t operator[](std::size_t k) const { return indices_[k]; }

  friend bool operator==(const CompositionWord&, const CompositionWord&) = default;

 private:
  std::vector<std::uint64_t> indices_;
};

// b / (1 - r) componentwise.
std::vector<Rational> fixed_point(const MapDescriptor& map);
std::vector<double> fixed_point(const AffineMap& map);

// outer o inner: ratio r_o * r_i, translation r_o * b_i + b_o.
MapDescriptor compose(const MapDescriptor& outer, const MapDescriptor& inner);
AffineMap compose(const AffineMap& outer, const AffineMap& inner);

// k-fold self composition, k >= 1.
MapDescriptor power_compose(const MapDescriptor& map, unsigned k);

// Composition along a word over a 1-based alphabet.
MapDescriptor compose_word(std::span<const MapDescriptor> alphabet,
                           const CompositionWord& word);

}  // namespace cifs
