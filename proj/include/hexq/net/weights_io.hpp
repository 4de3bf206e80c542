#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "hexq/error.hpp"
#include "hexq/net/qnetwork.hpp"

// Weight file layout, all integers and floats little-endian:
//   "NHX1"  u32 format_version
//   u32 board_size  u32 conv_layers  u32 filters_d3  u32 filters_d5
//   u32 precision (0 single, 1 double)  u64 init_seed
//   parameter arrays in declaration order, as raw IEEE values of the precision.

namespace hexq {

inline constexpr std::array<char, 4> kWeightsMagic{'N', 'H', 'X', '1'};
inline constexpr std::uint32_t kWeightsFormatVersion = 1;

namespace detail {

template <typename U>
void put_le(std::vector<unsigned char>& out, U value) {
  using Bits = std::conditional_t<sizeof(U) == 8, std::uint64_t, std::uint32_t>;
  auto bits = std::bit_cast<Bits>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<unsigned char>(bits & 0xffu));
    bits >>= 8;
  }
}

template <typename U>
U get_le(const std::vector<unsigned char>& in, std::size_t& pos) {
  using Bits = std::conditional_t<sizeof(U) == 8, std::uint64_t, std::uint32_t>;
  if (pos + sizeof(U) > in.size()) throw LoadError("weight file truncated");
  Bits bits = 0;
  for (std::size_t i = sizeof(U); i-- > 0;) bits = (bits << 8) | in[pos + i];
  pos += sizeof(U);
  return std::bit_cast<U>(bits);
}

}  // namespace detail

template <typename T>
std::vector<unsigned char> serialize_weights(const QNetwork<T>& net) {
  std::vector<unsigned char> out(kWeightsMagic.begin(), kWeightsMagic.end());
  const NetConfig& c = net.config;
  detail::put_le<std::uint32_t>(out, kWeightsFormatVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.board_size));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.conv_layers));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.filters_d3));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.filters_d5));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.precision));
  detail::put_le<std::uint64_t>(out, c.init_seed);
  for (const auto& arr : net.params.arrays) {
    for (const T v : arr.values) detail::put_le<T>(out, v);
  }
  return out;
}

/// Parses a weight image; throws LoadError on any mismatch, so a partially
/// read network is never returned.
template <typename T>
QNetwork<T> deserialize_weights(const std::vector<unsigned char>& bytes,
                                const std::optional<NetConfig>& expected = std::nullopt) {
  if (bytes.size() < kWeightsMagic.size() ||
      !std::equal(kWeightsMagic.begin(), kWeightsMagic.end(), bytes.begin())) {
    throw LoadError("not a weight file (bad magic)");
  }
  std::size_t pos = kWeightsMagic.size();
  const auto version = detail::get_le<std::uint32_t>(bytes, pos);
  if (version != kWeightsFormatVersion) {
    throw LoadError("unsupported weight format version " + std::to_string(version));
  }
  NetConfig cfg;
  cfg.board_size = static_cast<int>(detail::get_le<std::uint32_t>(bytes, pos));
  cfg.conv_layers = static_cast<int>(detail::get_le<std::uint32_t>(bytes, pos));
  cfg.filters_d3 = static_cast<int>(detail::get_le<std::uint32_t>(bytes, pos));
  cfg.filters_d5 = static_cast<int>(detail::get_le<std::uint32_t>(bytes, pos));
  const auto precision = detail::get_le<std::uint32_t>(bytes, pos);
  if (precision > 1) throw LoadError("unknown precision tag");
  cfg.precision = static_cast<Precision>(precision);
  cfg.init_seed = detail::get_le<std::uint64_t>(bytes, pos);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw LoadError(std::string("weight file carries an invalid config: ") + e.what());
  }
  if (cfg.precision != precision_of<T>()) throw LoadError("weight file precision does not match");
  if (expected) {
    if (expected->board_size != cfg.board_size) {
      throw LoadError("weight file is for board size " + std::to_string(cfg.board_size) + ", expected " +
                      std::to_string(expected->board_size));
    }
    if (expected->conv_layers != cfg.conv_layers || expected->filters_d3 != cfg.filters_d3 ||
        expected->filters_d5 != cfg.filters_d5) {
      throw LoadError("weight file architecture does not match the expected config");
    }
  }

  QNetwork<T> net{cfg, make_parameter_set<T>(cfg)};
  if (bytes.size() - pos != net.params.parameter_count() * sizeof(T)) {
    throw LoadError("weight file has " + std::to_string(bytes.size() - pos) +
                    " parameter bytes, expected " + std::to_string(net.params.parameter_count() * sizeof(T)));
  }
  for (auto& arr : net.params.arrays) {
    for (T& v : arr.values) v = detail::get_le<T>(bytes, pos);
  }
  return net;
}

template <typename T>
void save_weights(const QNetwork<T>& net, const std::filesystem::path& path) {
  const auto bytes = serialize_weights(net);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

template <typename T>
QNetwork<T> load_weights(const std::filesystem::path& path,
                         const std::optional<NetConfig>& expected = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_weights<T>(bytes, expected);
}

}  // namespace hexq
