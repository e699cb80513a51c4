#ifndef PEOC_PARAM_IO_HPP_
#define PEOC_PARAM_IO_HPP_

// Binary parameter container shared by policy snapshots and autoencoders:
//   bytes 0..3   magic ("PEOC" or "PAEB")
//   bytes 4..7   version, u32 little-endian
//   bytes 8..15  parameter count, u64 little-endian
//   then count IEEE-754 doubles, little-endian, in layer order.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace peoc::io {

inline constexpr std::string_view kPolicyMagic = "PEOC";
inline constexpr std::string_view kAutoencoderMagic = "PAEB";
inline constexpr std::uint32_t kFormatVersion = 1;

std::string encode_params(std::string_view magic, const std::vector<double>& values);

// Throws FormatError on bad magic, version, or length.
std::vector<double> decode_params(std::string_view magic, std::string_view bytes);

void save_params(const std::filesystem::path& path, std::string_view magic,
                 const std::vector<double>& values);
std::vector<double> load_params(const std::filesystem::path& path,
                                std::string_view magic);

}  // namespace peoc::io

#endif  // PEOC_PARAM_IO_HPP_
