#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace twsbench {

/// A report directory held in memory: relative path -> file contents.
struct Report {
  std::map<std::string, std::string> files;

  void add(const std::string& relative_path, std::string contents);
  bool has(const std::string& relative_path) const { return files.contains(relative_path); }
  const std::string& at(const std::string& relative_path) const;
};

/// Writes every file into a temporary sibling directory, then swaps it into place, so `dir`
/// either holds the complete report or is left untouched.
void write_report(const Report& report, const std::filesystem::path& dir);

// Reads every regular file below `dir` (for inspection and comparison).
Report read_report(const std::filesystem::path& dir);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace twsbench
