#include "labbook/analysis/compare.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "labbook/analysis/csv.hpp"
#include "labbook/analysis/metrics.hpp"
#include "labbook/analysis/tam.hpp"
#include "labbook/error.hpp"

namespace labbook::analysis {

GroupComparison compare_groups(const std::string& variable, const std::string& name_a,
                               const std::vector<double>& a, const std::string& name_b,
                               const std::vector<double>& b, const CompareOptions& options) {
  GroupComparison g;
  g.variable = variable;
  g.group_a = name_a;
  g.group_b = name_b;
  g.n_a = a.size();
  g.n_b = b.size();
  g.mwu = mann_whitney_u(a, b, options.mwu);
  g.median_a = median(a);
  g.median_b = median(b);
  if (a.size() < 2 || b.size() < 2) {
    g.t_refused = "t-test needs at least two values per group";
  } else {
    g.t = t_test_ind(a, b, options.variance);
  }
  return g;
}

namespace {

struct Grouper {
  GroupedData data;
  std::string source;

  std::size_t group_index(const std::string& name, std::size_t line) {
    for (std::size_t i = 0; i < data.groups.size(); ++i) {
      if (data.groups[i] == name) return i;
    }
    if (data.groups.size() == 2) {
      throw Error(Errc::invalid_input, source + ":" + std::to_string(line) + ": third group '" + name +
                                           "'; exactly two groups are compared");
    }
    data.groups.push_back(name);
    for (auto& v : data.values) v.emplace_back();
    return data.groups.size() - 1;
  }

  void finish() {
    if (data.groups.size() != 2) {
      throw Error(Errc::invalid_input, source + ": need exactly two groups, found " +
                                           std::to_string(data.groups.size()));
    }
  }
};

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::not_found, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

} // namespace

GroupedData grouped_from_tam_csv(std::string_view text, const std::string& source) {
  auto rows = parse_tam_csv(text, source);
  Grouper g{{{}, {"pu", "peou"}, {{}, {}}}, source};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto gi = g.group_index(rows[i].group, i + 2);
    auto s = score_tam(rows[i].response);
    g.data.values[0][gi].push_back(s.pu);
    g.data.values[1][gi].push_back(s.peou);
  }
  g.finish();
  return g.data;
}

GroupedData grouped_from_metrics_csv(std::string_view text, const std::string& source,
                                     const std::filesystem::path& base) {
  auto rows = parse_csv(text, source);
  if (rows.empty() || rows[0] != CsvRow{"participant_id", "group", "repo_path"}) {
    throw Error(Errc::invalid_input, source + ":1: expected participant_id,group,repo_path");
  }
  Grouper g{{{},
             {"mindmap_saves", "mindmap_states_final", "mindmap_states_cumulative", "measurement_interactions",
              "annotated_states", "annotation_chars"},
             std::vector<std::vector<std::vector<double>>>(6)},
            source};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3) {
      throw Error(Errc::invalid_input, source + ":" + std::to_string(r + 1) + ": expected 3 fields");
    }
    auto gi = g.group_index(rows[r][1], r + 1);
    std::filesystem::path repo = rows[r][2];
    if (repo.is_relative()) repo = base / repo;
    UsageMetrics m;
    try {
      m = repo_metrics(repo);
    } catch (const Error& e) {
      throw Error(e.code(), source + ":" + std::to_string(r + 1) + ": " + e.what());
    }
    const std::int64_t vals[] = {m.mindmap_saves,           m.mindmap_states_final, m.mindmap_states_cumulative,
                                 m.measurement_interactions, m.annotated_states,     m.annotation_chars};
    for (std::size_t v = 0; v < 6; ++v) g.data.values[v][gi].push_back(static_cast<double>(vals[v]));
  }
  g.finish();
  return g.data;
}

GroupedData grouped_from_csv_file(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  auto source = path.string();
  auto header = text.substr(0, text.find('\n'));
  if (header.find("repo_path") != std::string::npos) {
    return grouped_from_metrics_csv(text, source, path.parent_path());
  }
  return grouped_from_tam_csv(text, source);
}

std::vector<GroupComparison> compare_all(const GroupedData& data, const CompareOptions& options) {
  std::vector<GroupComparison> out;
  for (std::size_t v = 0; v < data.variables.size(); ++v) {
    out.push_back(compare_groups(data.variables[v], data.groups[0], data.values[v][0], data.groups[1],
                                 data.values[v][1], options));
  }
  return out;
}

std::string comparisons_to_text(const std::vector<GroupComparison>& rows) {
  std::vector<std::vector<std::string>> cells;
  if (rows.empty()) return "";
  const auto& first = rows.front();
  cells.push_back({"variable", "n(" + first.group_a + ")", "n(" + first.group_b + ")", "median(" + first.group_a + ")",
                   "median(" + first.group_b + ")", "U", "p(MWU " + std::string(method_name(first.mwu.method)) + ")",
                   "t", "df",
                   "p(t " + std::string(first.t ? variance_name(first.t->variance) : std::string_view("-")) + ")"});
  for (const auto& r : rows) {
    cells.push_back({r.variable, std::to_string(r.n_a), std::to_string(r.n_b), num("%.2f", r.median_a),
                     num("%.2f", r.median_b), num("%.1f", r.mwu.u), num("%.4f", r.mwu.p),
                     r.t ? num("%.3f", r.t->t) : "-", r.t ? num("%.2f", r.t->df) : "-",
                     r.t ? num("%.4f", r.t->p) : "-"});
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += "  ";
      // first column left-aligned, numbers right-aligned
      auto pad = std::string(width[i] - row[i].size(), ' ');
      line += i == 0 ? row[i] + pad : pad + row[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  for (const auto& r : rows) {
    if (!r.t) out += r.variable + ": " + r.t_refused + "\n";
  }
  return out;
}

std::string comparisons_to_csv(const std::vector<GroupComparison>& rows) {
  std::string out = "variable,group_a,group_b,n_a,n_b,median_a,median_b,u,u_min,p_mwu,mwu_method,t,df,p_t,variance\n";
  for (const auto& r : rows) {
    out += csv_field(r.variable) + "," + csv_field(r.group_a) + "," + csv_field(r.group_b) + "," +
           std::to_string(r.n_a) + "," + std::to_string(r.n_b) + "," + num("%.10g", r.median_a) + "," +
           num("%.10g", r.median_b) + "," + num("%.10g", r.mwu.u) + "," + num("%.10g", r.mwu.u_min) + "," +
           num("%.10g", r.mwu.p) + "," + std::string(method_name(r.mwu.method)) + ",";
    if (r.t) {
      out += num("%.10g", r.t->t) + "," + num("%.10g", r.t->df) + "," + num("%.10g", r.t->p) + "," +
             std::string(variance_name(r.t->variance));
    } else {
      out += ",,,";
    }
    out += "\n";
  }
  return out;
}

Json comparisons_to_json(const std::vector<GroupComparison>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json j = {{"variable", r.variable},
              {"groups", {r.group_a, r.group_b}},
              {"n", {r.n_a, r.n_b}},
              {"medians", {r.median_a, r.median_b}},
              {"mann_whitney",
               {{"u", r.mwu.u}, {"u_min", r.mwu.u_min}, {"p", r.mwu.p}, {"method", method_name(r.mwu.method)}}}};
    if (r.t) {
      j["t_test"] = {{"t", r.t->t}, {"df", r.t->df}, {"p", r.t->p}, {"variance", variance_name(r.t->variance)}};
    } else {
      j["t_test"] = nullptr;
      j["t_refused"] = r.t_refused;
    }
    out.push_back(std::move(j));
  }
  return out;
}

} // namespace labbook::analysis
