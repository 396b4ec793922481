#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ptstl {

/// Packed sequence of booleans. Bits past size() are always zero.
class BitVector {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitVector() = default;
  explicit BitVector(std::size_t n, bool value = false)
      : size_(n), words_(word_count(n), value ? ~word_type{0} : word_type{0}) {
    clear_tail();
  }

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool empty() const noexcept { return size_ == 0; }

  [[nodiscard]] bool test(std::size_t i) const noexcept {
    assert(i < size_);
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
  }
  [[nodiscard]] bool operator[](std::size_t i) const noexcept { return test(i); }

  void set(std::size_t i, bool value = true) noexcept {
    assert(i < size_);
    const word_type mask = word_type{1} << (i % kWordBits);
    if (value) {
      words_[i / kWordBits] |= mask;
    } else {
      words_[i / kWordBits] &= ~mask;
    }
  }

  void resize(std::size_t n) {
    size_ = n;
    words_.resize(word_count(n));
    clear_tail();
  }

  void fill(bool value) noexcept {
    for (auto& w : words_) w = value ? ~word_type{0} : word_type{0};
    clear_tail();
  }

  [[nodiscard]] std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  BitVector& operator&=(const BitVector& o) noexcept {
    assert(size_ == o.size_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  BitVector& operator|=(const BitVector& o) noexcept {
    assert(size_ == o.size_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  BitVector& flip() noexcept {
    for (auto& w : words_) w = ~w;
    clear_tail();
    return *this;
  }

  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
  friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
  friend BitVector operator~(BitVector a) { return a.flip(); }
  friend bool operator==(const BitVector&, const BitVector&) = default;

  /// popcount(a & b)
  [[nodiscard]] static std::size_t count_and(const BitVector& a, const BitVector& b) noexcept {
    assert(a.size_ == b.size_);
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
      c += static_cast<std::size_t>(std::popcount(a.words_[i] & b.words_[i]));
    }
    return c;
  }
  /// popcount(a & ~b)
  [[nodiscard]] static std::size_t count_and_not(const BitVector& a, const BitVector& b) noexcept {
    assert(a.size_ == b.size_);
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
      c += static_cast<std::size_t>(std::popcount(a.words_[i] & ~b.words_[i]));
    }
    return c;
  }
  /// popcount((a | b) & c)
  [[nodiscard]] static std::size_t count_or_and(const BitVector& a, const BitVector& b,
                                                const BitVector& c) noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
      n += static_cast<std::size_t>(std::popcount((a.words_[i] | b.words_[i]) & c.words_[i]));
    }
    return n;
  }
  /// popcount((a | b) & ~c)
  [[nodiscard]] static std::size_t count_or_and_not(const BitVector& a, const BitVector& b,
                                                    const BitVector& c) noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
      n += static_cast<std::size_t>(std::popcount((a.words_[i] | b.words_[i]) & ~c.words_[i]));
    }
    return n;
  }

  /// Bits [first, first + len) as a new vector.
  [[nodiscard]] BitVector slice(std::size_t first, std::size_t len) const {
    assert(first + len <= size_);
    BitVector out(len);
    for (std::size_t i = 0; i < len; ++i) {
      if (test(first + i)) out.set(i);
    }
    return out;
  }

  /// "0101..." with bit 0 first.
  [[nodiscard]] std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if (test(i)) s[i] = '1';
    }
    return s;
  }

  [[nodiscard]] static BitVector from_string(const std::string& s) {
    BitVector out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') out.set(i);
    }
    return out;
  }

  [[nodiscard]] const std::vector<word_type>& words() const noexcept { return words_; }
  [[nodiscard]] std::vector<word_type>& words() noexcept { return words_; }

  /// Restores the zero-tail invariant after direct word writes.
  void clear_tail() noexcept {
    const std::size_t rem = size_ % kWordBits;
    if (rem != 0 && !words_.empty()) words_.back() &= (word_type{1} << rem) - 1;
  }

 private:
  static constexpr std::size_t word_count(std::size_t n) noexcept {
    return (n + kWordBits - 1) / kWordBits;
  }

  std::size_t size_ = 0;
  std::vector<word_type> words_;
};

}  // namespace ptstl
