#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "safescore/rankstat.hpp"

namespace safescore::testing {

inline std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(SAFESCORE_TEST_DATA) / relative;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Compares against tests/golden/<name>. With SAFESCORE_UPDATE_GOLDEN set, the
// file is rewritten instead.
inline void expect_golden(const std::string& name, const std::string& actual) {
  const auto path = data_path("golden/" + name);
  if (std::getenv("SAFESCORE_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << path;
  EXPECT_EQ(actual, read_file(path)) << "golden " << name;
}

inline std::size_t bounded(std::mt19937_64& engine, std::size_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t x = engine();
  while (x >= limit) x = engine();
  return static_cast<std::size_t>(x % bound);
}

// Sizes in [1, max_size]. With `ties`, values come from a grid of 8 points.
inline PopulationPair random_pair(std::mt19937_64& engine, bool ties, std::size_t max_size = 50) {
  PopulationPair pair;
  pair.group = "g";
  const auto n = 1 + bounded(engine, max_size);
  const auto m = 1 + bounded(engine, max_size);
  std::normal_distribution<double> normal(2.0, 1.5);
  auto value = [&](double shift) {
    if (ties) return 0.25 * static_cast<double>(bounded(engine, 8)) + 0.5;
    return normal(engine) + shift;
  };
  for (std::size_t i = 0; i < n; ++i) pair.harmful.push_back(value(0.8));
  for (std::size_t j = 0; j < m; ++j) pair.benign.push_back(value(0.0));
  return pair;
}

}  // namespace safescore::testing
