#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace pdt {

/// Bit-parallel longest-common-subsequence length (Allison-Dix / Hyyro):
/// one pass over the text with ceil(|pattern|/64) word operations per symbol.
///
/// Usage: `prepare(pattern)` once, then `length(text)` for any number of
/// texts. Symbols are dense ids below `alphabet_size`.
class BitLcs {
 public:
  explicit BitLcs(std::size_t alphabet_size) : slot_(alphabet_size, kNone) {}

  void prepare(std::span<const std::uint32_t> pattern) {
    for (auto sym : used_) slot_[sym] = kNone;
    used_.clear();
    pattern_len_ = pattern.size();
    words_ = (pattern_len_ + 63) / 64;
    masks_.clear();
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const auto sym = pattern[i];
      if (slot_[sym] == kNone) {
        slot_[sym] = static_cast<std::uint32_t>(used_.size());
        used_.push_back(sym);
        masks_.resize(masks_.size() + words_, 0);
      }
      masks_[slot_[sym] * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
    }
    v_.assign(words_, 0);
  }

  std::size_t length(std::span<const std::uint32_t> text) {
    if (words_ == 0 || text.empty()) return 0;
    std::fill(v_.begin(), v_.end(), ~std::uint64_t{0});
    for (auto sym : text) {
      if (sym >= slot_.size() || slot_[sym] == kNone) continue;
      const std::uint64_t* m = &masks_[slot_[sym] * words_];
      std::uint64_t carry = 0;
      for (std::size_t w = 0; w < words_; ++w) {
        const std::uint64_t v = v_[w];
        const std::uint64_t u = v & m[w];
        // (v + u) with carry across words, then | (v - u).
        const std::uint64_t sum1 = v + u;
        const std::uint64_t c1 = sum1 < v ? 1 : 0;
        const std::uint64_t sum = sum1 + carry;
        const std::uint64_t c2 = sum < sum1 ? 1 : 0;
        carry = c1 | c2;
        v_[w] = sum | (v - u);
      }
    }
    std::size_t zeros = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t v = ~v_[w];
      if (w + 1 == words_ && pattern_len_ % 64 != 0) v &= (std::uint64_t{1} << (pattern_len_ % 64)) - 1;
      zeros += static_cast<std::size_t>(std::popcount(v));
    }
    return zeros;
  }

 private:
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  std::vector<std::uint32_t> slot_;
  std::vector<std::uint32_t> used_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::uint64_t> v_;
  std::size_t pattern_len_ = 0;
  std::size_t words_ = 0;
};

}  // namespace pdt
