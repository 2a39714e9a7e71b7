#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace labbook::analysis {

inline constexpr int kLikertItems = 12;

/// Twelve seven-point answers: items 1-6 usefulness, 7-12 ease of use.
struct LikertResponse {
  std::array<int, kLikertItems> items{};
};

struct TamScores {
  double pu = 0;   // perceived usefulness, 0..100
  double peou = 0; // perceived ease of use, 0..100
};

// Each scale is (mean - 1) / 6 * 100. Throws Error(invalid_input) for an
// item outside 1..7.
TamScores score_tam(const LikertResponse& response);

struct TamRow {
  std::string participant;
  std::string group;
  LikertResponse response;
};

// Header participant_id,group,item1..item12. Throws Error(invalid_input)
// naming `source` and the line.
std::vector<TamRow> parse_tam_csv(std::string_view text, const std::string& source);

} // namespace labbook::analysis
