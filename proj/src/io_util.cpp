#include "elc/io_util.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "elc/error.hpp"

namespace elc {

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir =
      target.has_parent_path() ? target.parent_path() : fs::path(".");
  if (!fs::exists(dir)) {
    throw DataError("atomic_write_file: directory does not exist: " +
                    dir.string());
  }
  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("atomic_write_file: cannot open " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw DataError("atomic_write_file: short write to " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace elc
