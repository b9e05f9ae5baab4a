#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "dtss/errors.hpp"

namespace dtss {

// A W-bit value (W chosen at runtime, at most MaxLimbs * 64) representing a
// subset of {0, ..., W-1}: bit i is set iff i is a member. Bits at positions
// >= W are kept at zero by every operation, so shifts behave like fixed-width
// hardware registers. Binary operations require equal widths.
//
// The limb count is a template parameter so the search kernel can be
// instantiated for narrow widths without paying for the full ceiling.
template <std::size_t MaxLimbs>
class BasicBitWord {
  static_assert(MaxLimbs >= 1);

 public:
  using Limb = std::uint64_t;
  static constexpr std::size_t kLimbBits = 64;
  static constexpr std::size_t kMaxWidth = MaxLimbs * kLimbBits;

  BasicBitWord() = default;

  explicit BasicBitWord(std::size_t width) : width_(static_cast<std::uint32_t>(width)) {
    if (width == 0 || width > kMaxWidth) {
      throw UsageError("bit word width " + std::to_string(width) + " outside [1, " +
                       std::to_string(kMaxWidth) + "]");
    }
    limbs_used_ = static_cast<std::uint32_t>((width + kLimbBits - 1) / kLimbBits);
  }

  static BasicBitWord from_marks(std::size_t width, std::span<const int> marks) {
    BasicBitWord w(width);
    for (int m : marks) w.set(static_cast<std::size_t>(m));
    return w;
  }

  static BasicBitWord from_marks(std::size_t width, std::initializer_list<int> marks) {
    return from_marks(width, std::span<const int>(marks.begin(), marks.size()));
  }

  std::size_t width() const noexcept { return width_; }

  bool is_zero() const noexcept {
    for (std::size_t i = 0; i < limbs_used_; ++i) {
      if (limbs_[i] != 0) return false;
    }
    return true;
  }

  bool test(std::size_t i) const {
    check_index(i);
    return (limbs_[i / kLimbBits] >> (i % kLimbBits)) & 1U;
  }

  BasicBitWord& set(std::size_t i) {
    check_index(i);
    limbs_[i / kLimbBits] |= Limb{1} << (i % kLimbBits);
    return *this;
  }

  BasicBitWord& reset(std::size_t i) {
    check_index(i);
    limbs_[i / kLimbBits] &= ~(Limb{1} << (i % kLimbBits));
    return *this;
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (std::size_t i = 0; i < limbs_used_; ++i) c += static_cast<std::size_t>(std::popcount(limbs_[i]));
    return c;
  }

  // Highest set position, or -1 for the empty set.
  int highest() const noexcept {
    for (std::size_t i = limbs_used_; i-- > 0;) {
      if (limbs_[i] != 0) {
        return static_cast<int>(i * kLimbBits) + std::bit_width(limbs_[i]) - 1;
      }
    }
    return -1;
  }

  // Ascending list of set positions.
  std::vector<int> marks() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < limbs_used_; ++i) {
      Limb v = limbs_[i];
      while (v != 0) {
        out.push_back(static_cast<int>(i * kLimbBits) + std::countr_zero(v));
        v &= v - 1;
      }
    }
    return out;
  }

  BasicBitWord operator<<(std::size_t s) const noexcept {
    BasicBitWord r = blank();
    if (s >= width_) return r;
    if constexpr (MaxLimbs == 1) {
      r.limbs_[0] = limbs_[0] << s;
    } else {
      const std::size_t ws = s / kLimbBits;
      const std::size_t bs = s % kLimbBits;
      for (std::size_t i = limbs_used_; i-- > ws;) {
        Limb v = limbs_[i - ws] << bs;
        if (bs != 0 && i > ws) v |= limbs_[i - ws - 1] >> (kLimbBits - bs);
        r.limbs_[i] = v;
      }
    }
    r.clear_tail();
    return r;
  }

  BasicBitWord operator>>(std::size_t s) const noexcept {
    BasicBitWord r = blank();
    if (s >= width_) return r;
    if constexpr (MaxLimbs == 1) {
      r.limbs_[0] = limbs_[0] >> s;
    } else {
      const std::size_t ws = s / kLimbBits;
      const std::size_t bs = s % kLimbBits;
      for (std::size_t i = 0; i + ws < limbs_used_; ++i) {
        Limb v = limbs_[i + ws] >> bs;
        if (bs != 0 && i + ws + 1 < limbs_used_) v |= limbs_[i + ws + 1] << (kLimbBits - bs);
        r.limbs_[i] = v;
      }
    }
    return r;
  }

  BasicBitWord& operator&=(const BasicBitWord& o) {
    check_width(o);
    for (std::size_t i = 0; i < limbs_used_; ++i) limbs_[i] &= o.limbs_[i];
    return *this;
  }

  BasicBitWord& operator|=(const BasicBitWord& o) {
    check_width(o);
    for (std::size_t i = 0; i < limbs_used_; ++i) limbs_[i] |= o.limbs_[i];
    return *this;
  }

  BasicBitWord& operator^=(const BasicBitWord& o) {
    check_width(o);
    for (std::size_t i = 0; i < limbs_used_; ++i) limbs_[i] ^= o.limbs_[i];
    return *this;
  }

  // this &= ~o
  BasicBitWord& clear(const BasicBitWord& o) {
    check_width(o);
    for (std::size_t i = 0; i < limbs_used_; ++i) limbs_[i] &= ~o.limbs_[i];
    return *this;
  }

  friend BasicBitWord operator&(BasicBitWord a, const BasicBitWord& b) { return a &= b; }
  friend BasicBitWord operator|(BasicBitWord a, const BasicBitWord& b) { return a |= b; }
  friend BasicBitWord operator^(BasicBitWord a, const BasicBitWord& b) { return a ^= b; }

  // True iff the two sets share a member; avoids materialising the AND.
  bool intersects(const BasicBitWord& o) const {
    check_width(o);
    for (std::size_t i = 0; i < limbs_used_; ++i) {
      if ((limbs_[i] & o.limbs_[i]) != 0) return true;
    }
    return false;
  }

  friend bool operator==(const BasicBitWord& a, const BasicBitWord& b) noexcept {
    return a.width_ == b.width_ && a.limbs_ == b.limbs_;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int m : marks()) {
      if (!first) s += ',';
      s += std::to_string(m);
      first = false;
    }
    return s + "}";
  }

 private:
  BasicBitWord blank() const noexcept {
    BasicBitWord r;
    r.width_ = width_;
    r.limbs_used_ = limbs_used_;
    return r;
  }

  void clear_tail() noexcept {
    const std::size_t rem = width_ % kLimbBits;
    if (rem != 0) limbs_[limbs_used_ - 1] &= (Limb{1} << rem) - 1;
  }

  void check_index(std::size_t i) const {
    if (i >= width_) {
      throw UsageError("bit index " + std::to_string(i) + " outside width " + std::to_string(width_));
    }
  }

  void check_width(const BasicBitWord& o) const {
    if (o.width_ != width_) {
      throw UsageError("bit word width mismatch: " + std::to_string(width_) + " vs " +
                       std::to_string(o.width_));
    }
  }

  std::array<Limb, MaxLimbs> limbs_{};
  std::uint32_t width_ = 0;
  std::uint32_t limbs_used_ = 0;
};

inline constexpr std::size_t kMaxBitWidth = 1024;

using BitWord = BasicBitWord<kMaxBitWidth / 64>;

template <std::size_t L>
BasicBitWord<L> shl(const BasicBitWord<L>& x, std::size_t s) { return x << s; }

template <std::size_t L>
BasicBitWord<L> shr(const BasicBitWord<L>& x, std::size_t s) { return x >> s; }

}  // namespace dtss
