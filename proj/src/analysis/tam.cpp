#include "labbook/analysis/tam.hpp"

#include <charconv>

#include "labbook/analysis/csv.hpp"
#include "labbook/error.hpp"

namespace labbook::analysis {

namespace {

double scale(const LikertResponse& r, int first) {
  int sum = 0;
  for (int i = first; i < first + 6; ++i) sum += r.items[static_cast<std::size_t>(i)];
  // Exact for sums of small integers: (sum/6 - 1)/6*100 == (sum - 6)*100/36.
  return (sum - 6) * 100.0 / 36.0;
}

} // namespace

TamScores score_tam(const LikertResponse& response) {
  for (int i = 0; i < kLikertItems; ++i) {
    int v = response.items[static_cast<std::size_t>(i)];
    if (v < 1 || v > 7) {
      throw Error(Errc::invalid_input, "item" + std::to_string(i + 1) + " = " + std::to_string(v) + " is outside 1..7");
    }
  }
  return {scale(response, 0), scale(response, 6)};
}

std::vector<TamRow> parse_tam_csv(std::string_view text, const std::string& source) {
  auto rows = parse_csv(text, source);
  if (rows.empty()) throw Error(Errc::invalid_input, source + ": empty file");
  const auto& header = rows[0];
  if (header.size() != 2 + kLikertItems || header[0] != "participant_id" || header[1] != "group") {
    throw Error(Errc::invalid_input, source + ":1: expected participant_id,group,item1..item12");
  }
  for (int i = 0; i < kLikertItems; ++i) {
    if (header[2 + static_cast<std::size_t>(i)] != "item" + std::to_string(i + 1)) {
      throw Error(Errc::invalid_input, source + ":1: expected column item" + std::to_string(i + 1));
    }
  }
  std::vector<TamRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto where = source + ":" + std::to_string(r + 1) + ": ";
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(Errc::invalid_input, where + "expected " + std::to_string(header.size()) + " fields");
    }
    TamRow t{row[0], row[1], {}};
    for (int i = 0; i < kLikertItems; ++i) {
      const auto& f = row[2 + static_cast<std::size_t>(i)];
      int v = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size() || v < 1 || v > 7) {
        throw Error(Errc::invalid_input, where + "item" + std::to_string(i + 1) + " must be an integer 1..7");
      }
      t.response.items[static_cast<std::size_t>(i)] = v;
    }
    out.push_back(std::move(t));
  }
  return out;
}

} // namespace labbook::analysis
