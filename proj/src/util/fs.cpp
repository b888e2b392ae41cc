#include "agentrec/util/fs.hpp"

#include <fstream>
#include <sstream>

#include "agentrec/error.hpp"

namespace agentrec::util {

namespace fs = std::filesystem;

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view data) {
  const fs::path tmp = path.string() + ".tmp";
  try {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::kStorageError, "cannot open " + tmp.string());
      out.write(data.data(), static_cast<std::streamsize>(data.size()));
      out.flush();
      if (!out) throw Error(ErrorCode::kStorageError, "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::kStorageError, e.what());
  }
}

}  // namespace agentrec::util
