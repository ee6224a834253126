#include "twsbench/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "twsbench/errors.hpp"

namespace twsbench {

namespace fs = std::filesystem;

void Report::add(const std::string& relative_path, std::string contents) {
  if (relative_path.empty() || fs::path(relative_path).is_absolute())
    fail(ErrorKind::Io, "report paths must be relative: '" + relative_path + "'");
  files[relative_path] = std::move(contents);
}

const std::string& Report::at(const std::string& relative_path) const {
  const auto it = files.find(relative_path);
  if (it == files.end()) fail(ErrorKind::MissingReport, "report has no file " + relative_path);
  return it->second;
}

void write_report(const Report& report, const fs::path& dir) {
  const fs::path target = fs::absolute(dir);
  const fs::path parent = target.parent_path();
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + parent.string() + ": " + ec.message());
  const fs::path tmp = parent / ("." + target.filename().string() + ".partial");
  fs::remove_all(tmp, ec);
  try {
    for (const auto& [rel, contents] : report.files) {
      const fs::path p = tmp / rel;
      fs::create_directories(p.parent_path());
      std::ofstream out(p, std::ios::binary);
      if (!out) fail(ErrorKind::Io, "cannot write " + p.string());
      out << contents;
      if (!out) fail(ErrorKind::Io, "write failed for " + p.string());
    }
    fs::create_directories(tmp);
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(tmp, target);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(tmp, ec);
    fail(ErrorKind::Io, e.what());
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
}

Report read_report(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::MissingReport, "no report directory at " + dir.string());
  Report r;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    r.files[fs::relative(entry.path(), dir).generic_string()] = ss.str();
  }
  return r;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace twsbench
