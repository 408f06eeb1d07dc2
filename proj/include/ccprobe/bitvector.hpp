#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ccprobe {

/// Packed truth vector over n states. Bits past `size()` are always zero.
class BitVector {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  BitVector() = default;
  explicit BitVector(std::size_t n, bool value = false);

  static BitVector from_bools(std::span<const bool> bits);
  static BitVector from_string(const std::string& bits);  // "1010..."

  std::size_t size() const noexcept { return size_; }
  std::size_t popcount() const noexcept;

  bool test(std::size_t i) const noexcept { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  void set(std::size_t i, bool value = true) noexcept;

  std::span<const Word> words() const noexcept { return words_; }
  std::span<Word> words() noexcept { return words_; }

  BitVector operator&(const BitVector& other) const;
  BitVector operator|(const BitVector& other) const;
  BitVector operator~() const;

  bool operator==(const BitVector& other) const noexcept = default;

  std::uint64_t hash() const noexcept;
  std::string to_string() const;

 private:
  void mask_tail() noexcept;
  void require_same_size(const BitVector& other) const;

  std::size_t size_ = 0;
  std::vector<Word> words_;
};

/// |a AND b| without materializing the intersection.
std::size_t intersection_count(const BitVector& a, const BitVector& b);
/// |a OR b| without materializing the union.
std::size_t union_count(const BitVector& a, const BitVector& b);

}  // namespace ccprobe
