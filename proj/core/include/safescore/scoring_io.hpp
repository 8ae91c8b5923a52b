#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "safescore/scoring.hpp"

namespace safescore {

// Strict readers: schema violations throw DataError with the line number.
std::vector<TokenScoreRecord> read_token_scores(std::istream& in);
std::vector<ScaledScore> read_scaled_scores(std::istream& in);

void write_token_scores(std::ostream& out, std::span<const TokenScoreRecord> records);
void write_scaled_scores(std::ostream& out, std::span<const ScaledScore> scores);

}  // namespace safescore
