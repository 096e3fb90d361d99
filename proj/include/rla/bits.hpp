// Small-universe bit sets for processes, channels, and edge labels.
#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <string>

namespace rla {

// Set of integers in [0, 64), one word wide. All model universes here are
// tiny (a handful of processes and channels), so a single word is plenty.
class Bits {
 public:
  constexpr Bits() = default;
  constexpr explicit Bits(std::uint64_t raw) : bits_(raw) {}

  static constexpr Bits single(int i) { return Bits(std::uint64_t{1} << i); }

  static constexpr Bits below(int n) {
    return n >= 64 ? Bits(~std::uint64_t{0}) : Bits((std::uint64_t{1} << n) - 1);
  }

  static Bits of(std::initializer_list<int> xs) {
    Bits b;
    for (int x : xs) b.set(x);
    return b;
  }

  constexpr bool test(int i) const { return (bits_ >> i) & 1; }
  void set(int i) { bits_ |= std::uint64_t{1} << i; }
  void reset(int i) { bits_ &= ~(std::uint64_t{1} << i); }

  constexpr bool none() const { return bits_ == 0; }
  constexpr bool any() const { return bits_ != 0; }
  constexpr int count() const { return std::popcount(bits_); }
  constexpr std::uint64_t raw() const { return bits_; }

  // Lowest set element; undefined when empty.
  constexpr int lowest() const {
    assert(bits_ != 0);
    return std::countr_zero(bits_);
  }

  constexpr bool subset_of(Bits other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(Bits other) const { return (bits_ & other.bits_) != 0; }

  friend constexpr Bits operator|(Bits a, Bits b) { return Bits(a.bits_ | b.bits_); }
  friend constexpr Bits operator&(Bits a, Bits b) { return Bits(a.bits_ & b.bits_); }
  friend constexpr Bits operator-(Bits a, Bits b) { return Bits(a.bits_ & ~b.bits_); }
  Bits& operator|=(Bits b) { bits_ |= b.bits_; return *this; }
  Bits& operator&=(Bits b) { bits_ &= b.bits_; return *this; }
  Bits& operator-=(Bits b) { bits_ &= ~b.bits_; return *this; }

  friend constexpr bool operator==(Bits a, Bits b) = default;

  class iterator {
   public:
    constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
    constexpr int operator*() const { return std::countr_zero(rest_); }
    constexpr iterator& operator++() { rest_ &= rest_ - 1; return *this; }
    constexpr bool operator!=(const iterator& o) const { return rest_ != o.rest_; }
   private:
    std::uint64_t rest_;
  };
  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int i : *this) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
    return s + "}";
  }

 private:
  std::uint64_t bits_ = 0;
};

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace rla
