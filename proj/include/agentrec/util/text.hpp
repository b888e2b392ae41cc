#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace agentrec::util {

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// Collapses every run of ASCII whitespace to a single space and trims.
std::string collapse_whitespace(std::string_view s);

// lowercase + trim + collapsed whitespace. Used for product identity, gold
// matching and fixture keys.
std::string normalize_key(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);

// Largest prefix of `s` no longer than `max_bytes` that does not cut a UTF-8
// sequence in half.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes);

}  // namespace agentrec::util
