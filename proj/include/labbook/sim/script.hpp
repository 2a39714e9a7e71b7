#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace labbook::sim {

enum class Verb { marker, distance, strikedip, remove, camera, bookmark, restore, sleep };

std::string_view verb_name(Verb verb) noexcept;

/// One script line. `numbers` holds the coordinates (or the sleep time),
/// `text` the marker label or the remove/restore reference.
struct Step {
  int line = 0;
  Verb verb = Verb::bookmark;
  std::vector<double> numbers;
  std::string text;
};

// Line-oriented; '#' starts a comment. Verbs:
//   marker x y z label...      distance x1 y1 z1 x2 y2 z2
//   strikedip 9 numbers        remove <m-ref>
//   camera x y z qw qx qy qz   bookmark
//   restore <c-ref>            sleep ms
// References: m<n> is the n-th measurement added by the script (from 1),
// c<n> the n-th commit acknowledged (c0 is HEAD when the repo was bound),
// "root", or a literal id. Throws Error(script_error) naming the line.
std::vector<Step> parse_script(std::string_view text, const std::string& source = "script");
std::vector<Step> load_script(const std::filesystem::path& path);

// Commit-producing steps: marker, distance, strikedip, remove, bookmark.
bool step_commits(const Step& step) noexcept;

} // namespace labbook::sim
