#ifndef CONVMPT_FINGERPRINT_HPP
#define CONVMPT_FINGERPRINT_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace convmpt {

/// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

/// Content hash of a file as "fnv1a64:<hex>"; throws DataError if unreadable.
std::string fingerprint_file(const std::string& path);

}  // namespace convmpt

#endif  // CONVMPT_FINGERPRINT_HPP
