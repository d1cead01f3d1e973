#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "linkforge/error.hpp"

// Little-endian binary helpers for the index file formats.
namespace linkforge::binio {

static_assert(std::endian::native == std::endian::little, "index files are written in little-endian byte order");

template <typename T>
  requires std::is_trivially_copyable_v<T>
void write(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
T read(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw FormatError("unexpected end of index file");
  return value;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in, std::uint64_t limit = 1ULL << 30) {
  const auto n = read<std::uint64_t>(in);
  if (n > limit) throw FormatError("string length out of range in index file");
  std::string s(n, '\0');
  if (!in.read(s.data(), static_cast<std::streamsize>(n))) throw FormatError("unexpected end of index file");
  return s;
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
void write_array(std::ostream& out, const std::vector<T>& v) {
  write<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
std::vector<T> read_array(std::istream& in, std::uint64_t limit = 1ULL << 34) {
  const auto n = read<std::uint64_t>(in);
  if (n > limit / sizeof(T)) throw FormatError("array length out of range in index file");
  std::vector<T> v(n);
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)))) {
    throw FormatError("unexpected end of index file");
  }
  return v;
}

}  // namespace linkforge::binio
