#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace agentrec::util {

// Whole file as bytes; nullopt when it cannot be opened.
std::optional<std::string> read_file(const std::filesystem::path& path);

// Writes <path>.tmp then renames over path, creating parent directories.
// Throws Error(kStorageError).
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

}  // namespace agentrec::util
