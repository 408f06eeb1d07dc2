#include "ccprobe/bitvector.hpp"

#include "ccprobe/error.hpp"

namespace ccprobe {

namespace {
std::size_t word_count(std::size_t n) { return (n + BitVector::kWordBits - 1) / BitVector::kWordBits; }
}  // namespace

BitVector::BitVector(std::size_t n, bool value) : size_(n), words_(word_count(n), value ? ~Word{0} : Word{0}) {
  mask_tail();
}

BitVector BitVector::from_bools(std::span<const bool> bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) v.set(i);
  return v;
}

BitVector BitVector::from_string(const std::string& bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1')
      v.set(i);
    else if (bits[i] != '0')
      throw data_error("bit string may only contain '0' and '1'");
  }
  return v;
}

std::size_t BitVector::popcount() const noexcept {
  std::size_t count = 0;
  for (Word w : words_) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

void BitVector::set(std::size_t i, bool value) noexcept {
  const Word mask = Word{1} << (i % kWordBits);
  if (value)
    words_[i / kWordBits] |= mask;
  else
    words_[i / kWordBits] &= ~mask;
}

void BitVector::mask_tail() noexcept {
  const std::size_t tail = size_ % kWordBits;
  if (tail != 0 && !words_.empty()) words_.back() &= (Word{1} << tail) - 1;
}

void BitVector::require_same_size(const BitVector& other) const {
  if (size_ != other.size_)
    throw data_error("bitvector length mismatch: " + std::to_string(size_) + " vs " + std::to_string(other.size_));
}

BitVector BitVector::operator&(const BitVector& other) const {
  require_same_size(other);
  BitVector out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= other.words_[i];
  return out;
}

BitVector BitVector::operator|(const BitVector& other) const {
  require_same_size(other);
  BitVector out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] |= other.words_[i];
  return out;
}

BitVector BitVector::operator~() const {
  BitVector out = *this;
  for (Word& w : out.words_) w = ~w;
  out.mask_tail();
  return out;
}

std::uint64_t BitVector::hash() const noexcept {
  // FNV-1a over words, then a splitmix finalizer.
  std::uint64_t h = 1469598103934665603ULL ^ size_;
  for (Word w : words_) {
    h ^= w;
    h *= 1099511628211ULL;
  }
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

std::string BitVector::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if (test(i)) s[i] = '1';
  return s;
}

std::size_t intersection_count(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw data_error("bitvector length mismatch");
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t count = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) count += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  return count;
}

std::size_t union_count(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw data_error("bitvector length mismatch");
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t count = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) count += static_cast<std::size_t>(std::popcount(wa[i] | wb[i]));
  return count;
}

}  // namespace ccprobe
