#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>

#include "redecide/errors.hpp"

namespace redecide {

// Little-endian binary encoding helpers. Artifact files are bit-exact across
// platforms, so multi-byte values are always serialized explicitly.

inline void put_u8(std::string& out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(out, bits);
}

inline void put_string(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}

class BinReader {
 public:
  BinReader(const std::string& data, std::string what)
      : data_(data), what_(std::move(what)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    }
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    }
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool exhausted() const { return pos_ == data_.size(); }
  void expect_exhausted() const {
    if (!exhausted()) throw IoError(what_ + ": trailing bytes after payload");
  }

 private:
  void need(std::uint64_t n) const {
    if (pos_ + n > data_.size()) {
      throw IoError(what_ + ": truncated (wanted " + std::to_string(n) +
                    " bytes at offset " + std::to_string(pos_) + " of " +
                    std::to_string(data_.size()) + ")");
    }
  }
  const std::string& data_;
  std::string what_;
  std::size_t pos_ = 0;
};

std::string read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::string& bytes);

}  // namespace redecide
