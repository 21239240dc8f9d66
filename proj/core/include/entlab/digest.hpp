#pragma once

// Content digests for the run manifest (FIPS 180-4 SHA-256).

#include <filesystem>
#include <string>
#include <string_view>

namespace entlab {

std::string sha256_hex(std::string_view bytes);

/// Digest of a file's full contents.  Throws io_error when unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace entlab
