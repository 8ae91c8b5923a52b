#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace safescore {

// Raised for invalid or inconsistent input data. The CLI maps it to exit status 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A record-level problem that caused a record to be dropped rather than
// aborting the whole run.
struct Issue {
  std::string id;      // record id when known
  std::size_t line{};  // 1-based input line, 0 when not from a file
  std::string reason;
};

std::string describe(const Issue& issue);

}  // namespace safescore
