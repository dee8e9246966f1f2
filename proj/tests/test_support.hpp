#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include <doctest.h>

#include "printmap/error.hpp"

namespace test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "printmap-test-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Runs `fn` and returns the kind of the printmap::Error it throws.
template <typename Fn>
std::string error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const printmap::Error& e) {
    return std::string(e.kind_name());
  }
  return "no error";
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace test
