#include "peoc/param_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "peoc/errors.hpp"

namespace peoc::io {

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::string_view bytes, std::size_t pos) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  return value;
}

constexpr std::size_t kHeaderSize = 16;

}  // namespace

std::string encode_params(std::string_view magic, const std::vector<double>& values) {
  std::string out;
  out.reserve(kHeaderSize + 8 * values.size());
  out.append(magic);
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint64_t>(out, values.size());
  for (double v : values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

std::vector<double> decode_params(std::string_view magic, std::string_view bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("truncated header");
  if (bytes.substr(0, 4) != magic) {
    throw FormatError("bad magic '" + std::string(bytes.substr(0, 4)) +
                      "', expected '" + std::string(magic) + "'");
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kFormatVersion) {
    throw FormatError("unsupported version " + std::to_string(version));
  }
  const auto count = get_le<std::uint64_t>(bytes, 8);
  if (bytes.size() != kHeaderSize + 8 * count) {
    throw FormatError("payload size does not match parameter count " +
                      std::to_string(count));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes, kHeaderSize + 8 * i));
  }
  return values;
}

void save_params(const std::filesystem::path& path, std::string_view magic,
                 const std::vector<double>& values) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  const std::string bytes = encode_params(magic, values);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for " + path.string());
}

std::vector<double> load_params(const std::filesystem::path& path,
                                std::string_view magic) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(is)),
                          std::istreambuf_iterator<char>());
  return decode_params(magic, bytes);
}

}  // namespace peoc::io
