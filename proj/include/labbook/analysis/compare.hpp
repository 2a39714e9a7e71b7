#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labbook/analysis/mann_whitney.hpp"
#include "labbook/analysis/t_test.hpp"
#include "labbook/canonical_json.hpp"

namespace labbook::analysis {

struct GroupComparison {
  std::string variable;
  std::string group_a;
  std::string group_b;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double median_a = 0;
  double median_b = 0;
  MwuResult mwu;
  std::optional<TTestResult> t; // absent when a group has fewer than two values
  std::string t_refused;        // why, when absent
};

struct CompareOptions {
  MwuMethod mwu = MwuMethod::asymptotic_cc;
  Variance variance = Variance::pooled;
};

GroupComparison compare_groups(const std::string& variable, const std::string& name_a,
                               const std::vector<double>& a, const std::string& name_b,
                               const std::vector<double>& b, const CompareOptions& options = {});

/// One named variable observed per participant, split by group.
struct GroupedData {
  std::vector<std::string> groups; // exactly two, in order of first appearance
  std::vector<std::string> variables;
  // values[v][g] lists variable v's values in group g.
  std::vector<std::vector<std::vector<double>>> values;
};

// TAM responses become the variables pu and peou.
GroupedData grouped_from_tam_csv(std::string_view text, const std::string& source);
// participant_id,group,repo_path; relative paths resolve against `base`.
GroupedData grouped_from_metrics_csv(std::string_view text, const std::string& source,
                                     const std::filesystem::path& base);
// Picks the reader from the header.
GroupedData grouped_from_csv_file(const std::filesystem::path& path);

std::vector<GroupComparison> compare_all(const GroupedData& data, const CompareOptions& options = {});

std::string comparisons_to_text(const std::vector<GroupComparison>& rows);
std::string comparisons_to_csv(const std::vector<GroupComparison>& rows);
Json comparisons_to_json(const std::vector<GroupComparison>& rows);

} // namespace labbook::analysis
