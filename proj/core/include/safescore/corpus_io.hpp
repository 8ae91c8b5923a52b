#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "safescore/corpus.hpp"
#include "safescore/error.hpp"

namespace safescore {

struct RawAnnotationFile {
  std::vector<RawAnnotation> records;
  std::vector<Issue> issues;  // unparseable lines, dropped
};

// Lenient: a bad line is reported and skipped.
RawAnnotationFile read_raw_annotations(std::istream& in);

struct BinaryRecordFile {
  std::vector<BinaryRecord> records;
  std::vector<Issue> issues;
};

// Accepts `group` or `target_group` for the group field; missing ids become
// "row-<line>".
BinaryRecordFile read_binary_records(std::istream& in);

// Strict: any malformed line throws DataError.
EvaluationSet read_evaluation_set(std::istream& in, std::string provenance);

void write_evaluation_set(std::ostream& out, const EvaluationSet& set);

}  // namespace safescore
