// Small string helpers shared across modules.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fcjudge {

/// ASCII lowercase; bytes >= 0x80 are left untouched so offsets are stable.
std::string AsciiLower(std::string_view text);

std::string_view Trim(std::string_view text);

/// Lowercase hex SHA-256 digest of the given bytes.
std::string Sha256Hex(std::string_view bytes);

/// Splits on '\n'; a trailing newline does not produce an empty last line.
std::vector<std::string_view> SplitLines(std::string_view text);

/// Shortest decimal text that round-trips to the same double.
std::string FormatDouble(double value);

/// Cuts text to at most max_bytes without splitting a UTF-8 sequence.
std::string_view Utf8Prefix(std::string_view text, std::size_t max_bytes);

std::string ReadFile(const std::string& path);

}  // namespace fcjudge
