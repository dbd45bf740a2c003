#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace catalytic {

// Number of bits needed to write any value in [0, count). Zero for count <= 1.
constexpr unsigned bits_for(std::uint64_t count) {
  unsigned bits = 0;
  while (bits < 64 && (std::uint64_t{1} << bits) < count) ++bits;
  return bits;
}

// Cell i of a packed tape word lives in bit i.
constexpr unsigned cell(std::uint64_t word, unsigned i) {
  return static_cast<unsigned>((word >> i) & 1u);
}

constexpr std::uint64_t with_cell(std::uint64_t word, unsigned i, unsigned bit) {
  return bit ? (word | (std::uint64_t{1} << i)) : (word & ~(std::uint64_t{1} << i));
}

constexpr std::uint64_t low_mask(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

// A plain sequence of bits. Used for inputs, serialized configurations and
// the driver's virtual tape.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t size, bool value = false)
      : bits_(size, value ? 1 : 0) {}

  static BitString parse(std::string_view text) {
    BitString out;
    for (char ch : text) {
      if (ch == '0' || ch == '1') {
        out.bits_.push_back(static_cast<std::uint8_t>(ch - '0'));
      } else if (ch != '_' && ch != ' ') {
        throw std::invalid_argument("bit string may only contain 0 and 1: '" +
                                    std::string(text) + "'");
      }
    }
    return out;
  }

  // Cells 0..width-1 of `word` in order.
  static BitString from_word(std::uint64_t word, unsigned width) {
    BitString out(width);
    for (unsigned i = 0; i < width; ++i) out.bits_[i] = static_cast<std::uint8_t>(cell(word, i));
    return out;
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  unsigned operator[](std::size_t i) const { return bits_[i]; }
  unsigned at(std::size_t i) const {
    if (i >= bits_.size()) throw std::out_of_range("bit index out of range");
    return bits_[i];
  }
  void set(std::size_t i, unsigned bit) { bits_.at(i) = static_cast<std::uint8_t>(bit & 1u); }
  void push_back(unsigned bit) { bits_.push_back(static_cast<std::uint8_t>(bit & 1u)); }

  // Appends `width` bits of `value`, most significant first.
  void append_number(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) push_back(static_cast<unsigned>((value >> i) & 1u));
  }
  // Appends cells 0..width-1 of a packed tape word.
  void append_cells(std::uint64_t word, unsigned width) {
    for (unsigned i = 0; i < width; ++i) push_back(cell(word, i));
  }

  std::uint64_t read_number(std::size_t offset, unsigned width) const {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | at(offset + i);
    return v;
  }
  std::uint64_t read_cells(std::size_t offset, unsigned width) const {
    std::uint64_t w = 0;
    for (unsigned i = 0; i < width; ++i) w |= std::uint64_t{at(offset + i)} << i;
    return w;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  // Hex rendering, 4 bits per digit, first bit is the high bit of the first
  // digit. The tail is zero-padded.
  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    for (std::size_t i = 0; i < bits_.size(); i += 4) {
      unsigned nibble = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        nibble = (nibble << 1) | (i + k < bits_.size() ? bits_[i + k] : 0u);
      }
      s.push_back(digits[nibble]);
    }
    return s;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace catalytic
