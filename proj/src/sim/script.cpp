#include "labbook/sim/script.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "labbook/error.hpp"

namespace labbook::sim {

namespace {

struct VerbSpec {
  const char* name;
  Verb verb;
  int numbers; // -1: variable
};

constexpr VerbSpec kVerbs[] = {
    {"marker", Verb::marker, 3},   {"distance", Verb::distance, 6}, {"strikedip", Verb::strikedip, 9},
    {"remove", Verb::remove, 0},   {"camera", Verb::camera, 7},     {"bookmark", Verb::bookmark, 0},
    {"restore", Verb::restore, 0}, {"sleep", Verb::sleep, 1},
};

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

bool parse_number(const std::string& word, double& out) {
  const char* end = word.data() + word.size();
  auto [ptr, ec] = std::from_chars(word.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

[[noreturn]] void script_fail(const std::string& source, int line, const std::string& msg) {
  throw Error(Errc::script_error, source + ":" + std::to_string(line) + ": " + msg);
}

} // namespace

std::string_view verb_name(Verb verb) noexcept {
  for (const auto& v : kVerbs) {
    if (v.verb == verb) return v.name;
  }
  return "?";
}

bool step_commits(const Step& step) noexcept {
  switch (step.verb) {
  case Verb::marker:
  case Verb::distance:
  case Verb::strikedip:
  case Verb::remove:
  case Verb::bookmark:
    return true;
  default:
    return false;
  }
}

std::vector<Step> parse_script(std::string_view text, const std::string& source) {
  std::vector<Step> steps;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string_view line(raw);
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto words = split_words(line);
    if (words.empty()) continue;
    const VerbSpec* spec = nullptr;
    for (const auto& v : kVerbs) {
      if (words[0] == v.name) spec = &v;
    }
    if (!spec) script_fail(source, lineno, "unknown verb '" + words[0] + "'");
    Step step{lineno, spec->verb, {}, {}};
    std::size_t need = static_cast<std::size_t>(spec->numbers);
    if (words.size() - 1 < need) {
      script_fail(source, lineno, words[0] + " needs " + std::to_string(need) + " numbers");
    }
    for (std::size_t i = 0; i < need; ++i) {
      double v = 0;
      if (!parse_number(words[i + 1], v)) script_fail(source, lineno, "'" + words[i + 1] + "' is not a finite number");
      step.numbers.push_back(v);
    }
    std::vector<std::string> rest(words.begin() + 1 + static_cast<std::ptrdiff_t>(need), words.end());
    switch (spec->verb) {
    case Verb::marker:
      for (std::size_t i = 0; i < rest.size(); ++i) step.text += (i ? " " : "") + rest[i];
      break;
    case Verb::remove:
    case Verb::restore:
      if (rest.size() != 1) script_fail(source, lineno, words[0] + " takes exactly one reference");
      step.text = rest[0];
      break;
    case Verb::sleep:
      if (!rest.empty()) script_fail(source, lineno, "unexpected text after sleep");
      if (step.numbers[0] < 0 || step.numbers[0] > 600000) script_fail(source, lineno, "sleep must be 0..600000 ms");
      break;
    default:
      if (!rest.empty()) script_fail(source, lineno, "unexpected text after " + words[0]);
    }
    if (spec->verb == Verb::camera) {
      double n = std::hypot(std::hypot(step.numbers[3], step.numbers[4]), std::hypot(step.numbers[5], step.numbers[6]));
      if (std::fabs(n - 1.0) > 1e-9) script_fail(source, lineno, "camera quaternion must have unit length");
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

std::vector<Step> load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::not_found, "cannot read script " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_script(ss.str(), path.string());
}

} // namespace labbook::sim
