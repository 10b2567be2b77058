// Copyright (c) 2026 The ltfb authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "ltfb/core/error.hpp"

// Little-endian binary primitives for the bundle and checkpoint formats.
// Serialization is byte-explicit so files are identical across platforms.

namespace ltfb {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const char bytes[4] = {
      static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
      static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(bytes, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  put_u32(os, static_cast<std::uint32_t>(v & 0xffffffffULL));
  put_u32(os, static_cast<std::uint32_t>(v >> 32));
}

inline void put_f32(std::ostream& os, float v) {
  put_u32(os, std::bit_cast<std::uint32_t>(v));
}

inline void put_f64(std::ostream& os, double v) {
  put_u64(os, std::bit_cast<std::uint64_t>(v));
}

inline std::uint32_t get_u32(std::istream& is, const std::string& context) {
  unsigned char bytes[4];
  is.read(reinterpret_cast<char*>(bytes), 4);
  if (!is) throw IoError("truncated read while parsing " + context);
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& is, const std::string& context) {
  const std::uint64_t lo = get_u32(is, context);
  const std::uint64_t hi = get_u32(is, context);
  return lo | (hi << 32);
}

inline float get_f32(std::istream& is, const std::string& context) {
  return std::bit_cast<float>(get_u32(is, context));
}

inline double get_f64(std::istream& is, const std::string& context) {
  return std::bit_cast<double>(get_u64(is, context));
}

}  // namespace ltfb
