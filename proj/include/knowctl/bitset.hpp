#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace knowctl {

/// Fixed-width set of small indices. Places, transitions and processes are
/// all addressed by their declaration index, so every set-valued quantity in
/// the toolkit is one of these.
template <std::size_t Words>
class BitSet {
 public:
  static constexpr std::size_t kCapacity = Words * 64;

  constexpr BitSet() = default;

  static BitSet of(std::initializer_list<std::size_t> bits) {
    BitSet s;
    for (auto b : bits) s.set(b);
    return s;
  }

  template <typename Range>
  static BitSet from_indices(const Range& bits) {
    BitSet s;
    for (auto b : bits) s.set(static_cast<std::size_t>(b));
    return s;
  }

  /// The set {0, ..., n-1}.
  static BitSet first(std::size_t n) {
    BitSet s;
    for (std::size_t i = 0; i < n; ++i) s.set(i);
    return s;
  }

  void set(std::size_t i, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (value)
      words_[i / 64] |= mask;
    else
      words_[i / 64] &= ~mask;
  }
  void reset(std::size_t i) { set(i, false); }

  [[nodiscard]] bool test(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1U;
  }

  [[nodiscard]] bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  [[nodiscard]] std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  [[nodiscard]] bool subset_of(const BitSet& other) const {
    for (std::size_t i = 0; i < Words; ++i)
      if ((words_[i] & ~other.words_[i]) != 0) return false;
    return true;
  }

  [[nodiscard]] bool intersects(const BitSet& other) const {
    for (std::size_t i = 0; i < Words; ++i)
      if ((words_[i] & other.words_[i]) != 0) return true;
    return false;
  }

  BitSet& operator|=(const BitSet& o) {
    for (std::size_t i = 0; i < Words; ++i) words_[i] |= o.words_[i];
    return *this;
  }
  BitSet& operator&=(const BitSet& o) {
    for (std::size_t i = 0; i < Words; ++i) words_[i] &= o.words_[i];
    return *this;
  }
  /// Set difference.
  BitSet& operator-=(const BitSet& o) {
    for (std::size_t i = 0; i < Words; ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  friend BitSet operator|(BitSet a, const BitSet& b) { return a |= b; }
  friend BitSet operator&(BitSet a, const BitSet& b) { return a &= b; }
  friend BitSet operator-(BitSet a, const BitSet& b) { return a -= b; }

  friend bool operator==(const BitSet&, const BitSet&) = default;

  /// Calls f(i) for every member in ascending order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < Words; ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const auto low = static_cast<std::size_t>(std::countr_zero(bits));
        f(w * 64 + low);
        bits &= bits - 1;
      }
    }
  }

  [[nodiscard]] std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  /// Smallest member, or kCapacity when empty.
  [[nodiscard]] std::size_t front() const {
    for (std::size_t w = 0; w < Words; ++w)
      if (words_[w] != 0)
        return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    return kCapacity;
  }

  [[nodiscard]] std::uint64_t word(std::size_t w) const { return words_[w]; }

  [[nodiscard]] std::size_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto w : words_) {
      h ^= w;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }

  /// Lexicographic order on the ascending index lists; this is the canonical
  /// order every set-valued output is reported in.
  friend bool canonical_less(const BitSet& a, const BitSet& b) {
    for (std::size_t w = 0; w < Words; ++w) {
      const std::uint64_t diff = a.words_[w] ^ b.words_[w];
      if (diff == 0) continue;
      const auto low = static_cast<std::size_t>(std::countr_zero(diff));
      const bool a_has = (a.words_[w] >> low) & 1U;
      // The set holding the first differing index continues with that index;
      // the other one continues with something larger, or ends.
      const BitSet& other = a_has ? b : a;
      const bool other_continues = other.has_member_above(w * 64 + low);
      return a_has ? other_continues : !other_continues;
    }
    return false;
  }

 private:
  [[nodiscard]] bool has_member_above(std::size_t i) const {
    const std::size_t w = i / 64;
    const std::size_t bit = i % 64;
    if (bit < 63 && (words_[w] >> (bit + 1)) != 0) return true;
    for (std::size_t k = w + 1; k < Words; ++k)
      if (words_[k] != 0) return true;
    return false;
  }

  std::array<std::uint64_t, Words> words_{};
};

struct CanonicalLess {
  template <std::size_t W>
  bool operator()(const BitSet<W>& a, const BitSet<W>& b) const {
    return canonical_less(a, b);
  }
};

inline constexpr std::size_t kMaxPlaces = 256;
inline constexpr std::size_t kMaxTransitions = 256;
inline constexpr std::size_t kMaxProcesses = 64;

using PlaceSet = BitSet<kMaxPlaces / 64>;
using TransitionSet = BitSet<kMaxTransitions / 64>;
using ProcessSet = BitSet<kMaxProcesses / 64>;

/// A global state of a 1-safe net: the set of marked places.
using Marking = PlaceSet;

}  // namespace knowctl

template <std::size_t W>
struct std::hash<knowctl::BitSet<W>> {
  std::size_t operator()(const knowctl::BitSet<W>& s) const noexcept { return s.hash(); }
};
