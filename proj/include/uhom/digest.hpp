#pragma once

#include <string>

namespace uhom {

//! Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);
//! Same for a file's contents; ConfigError when it cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace uhom
