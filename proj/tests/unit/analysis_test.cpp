#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>


#include "expect_errc.hpp"
#include "oracles.hpp"
#include "labbook/analysis/compare.hpp"
#include "labbook/analysis/csv.hpp"
#include "labbook/analysis/mann_whitney.hpp"
#include "labbook/analysis/metrics.hpp"
#include "labbook/analysis/special.hpp"
#include "labbook/analysis/t_test.hpp"
#include "labbook/analysis/tam.hpp"
#include "labbook/provstore/bundle.hpp"
#include "metrics_fixture.hpp"
#include "test_util.hpp"

using namespace labbook;
using labbook::testing::beta_oracle;
using namespace labbook::analysis;
using labbook::testing::TempDir;

namespace {

std::string fixture_path(const std::string& name) { return std::string(LABBOOK_FIXTURE_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LikertResponse uniform_response(int v) {
  LikertResponse r;
  r.items.fill(v);
  return r;
}

std::vector<double> random_tie_free(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-100, 100);
  std::vector<double> xs(n);
  for (auto& x : xs) x = u(rng);
  return xs;
}

} // namespace

// ---- TAM ----

TEST(Tam, Endpoints) {
  auto hi = score_tam(uniform_response(7));
  EXPECT_EQ(hi.pu, 100.0);
  EXPECT_EQ(hi.peou, 100.0);
  auto lo = score_tam(uniform_response(1));
  EXPECT_EQ(lo.pu, 0.0);
  EXPECT_EQ(lo.peou, 0.0);
}

TEST(Tam, PublishedMediansAreLatticePoints) {
  // usefulness items sum to 31 (mean 31/6), ease of use items to 32
  LikertResponse r;
  r.items = {6, 5, 5, 5, 5, 5, 6, 6, 5, 5, 5, 5};
  auto s = score_tam(r);
  EXPECT_EQ(std::round(s.pu * 100) / 100, 69.44);
  EXPECT_EQ(std::round(s.peou * 100) / 100, 72.22);
  EXPECT_NEAR(s.pu, 625.0 / 9.0, 1e-12);
  EXPECT_NEAR(s.peou, 650.0 / 9.0, 1e-12);
}

TEST(Tam, RejectsOutOfRange) {
  auto r = uniform_response(4);
  r.items[11] = 8;
  EXPECT_ERRC(score_tam(r), Errc::invalid_input);
  r.items[11] = 0;
  EXPECT_ERRC(score_tam(r), Errc::invalid_input);
}

TEST(Tam, RaisingAnItemNeverLowersItsScale) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> item(1, 7);
  std::uniform_int_distribution<int> which(0, 11);
  for (int trial = 0; trial < 5000; ++trial) {
    LikertResponse r;
    for (auto& v : r.items) v = item(rng);
    int k = which(rng);
    if (r.items[static_cast<std::size_t>(k)] == 7) continue;
    auto before = score_tam(r);
    ++r.items[static_cast<std::size_t>(k)];
    auto after = score_tam(r);
    if (k < 6) {
      EXPECT_GT(after.pu, before.pu);
      EXPECT_EQ(after.peou, before.peou);
    } else {
      EXPECT_GT(after.peou, before.peou);
      EXPECT_EQ(after.pu, before.pu);
    }
  }
}

TEST(Tam, CsvErrorsNameTheLine) {
  auto header = std::string("participant_id,group,item1,item2,item3,item4,item5,item6,item7,item8,item9,item10,item11,item12\n");
  auto rows = parse_tam_csv(header + "p1,a,1,2,3,4,5,6,7,1,2,3,4,5\n\"p,2\",b,7,7,7,7,7,7,7,7,7,7,7,7\r\n", "t.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].participant, "p,2");
  try {
    parse_tam_csv(header + "p1,a,1,2,3,4,5,6,7,1,2,3,4,5\np2,b,1,2,3,4,5,6,7,1,2,3,4,9\n", "t.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("t.csv:3:", 0), 0u) << e.what();
  }
  EXPECT_ERRC(parse_tam_csv("participant_id,group,q1\n", "t.csv"), Errc::invalid_input);
  EXPECT_ERRC(parse_tam_csv(header + "p1,a,1,2\n", "t.csv"), Errc::invalid_input);
}

TEST(Csv, QuotingRoundTrips) {
  for (std::string field : {"plain", "with,comma", "with \"quote\"", "two\nlines", ""}) {
    auto rows = parse_csv(csv_field(field) + ",x\n", "q");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0][0], field);
  }
  EXPECT_ERRC(parse_csv("\"open,x\n", "q"), Errc::invalid_input);
}

// ---- special functions ----

TEST(IncompleteBeta, MatchesFrozenReferenceValues) {
  // scipy.special.betainc(a, b, x), scipy 1.15
  EXPECT_NEAR(incomplete_beta(0.3, 0.5, 0.5), 0.36901011956554536, 1e-15);
  EXPECT_NEAR(incomplete_beta(0.2, 10, 20), 0.049263517304212585, 1e-15);
  EXPECT_NEAR(incomplete_beta(0.001, 0.1, 40), 0.7583118865364049, 1e-14);
  EXPECT_NEAR(incomplete_beta(0.97, 45, 3.5), 0.901428348589467, 1e-14);
  EXPECT_EQ(incomplete_beta(0, 2, 3), 0);
  EXPECT_EQ(incomplete_beta(1, 2, 3), 1);
  EXPECT_ERRC(incomplete_beta(0.5, 0, 1), Errc::invalid_input);
  EXPECT_ERRC(incomplete_beta(1.5, 1, 1), Errc::invalid_input);
}

TEST(IncompleteBeta, AgreesWithQuadratureOn10kRandomPoints) {
  std::mt19937_64 rng(1234);
  // a, b log-uniform over [0.1, 50]; x uniform over (0, 1)
  std::uniform_real_distribution<double> log_ab(std::log(0.1), std::log(50.0));
  std::uniform_real_distribution<double> ux(1e-6, 1 - 1e-6);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    double a = std::exp(log_ab(rng));
    double b = std::exp(log_ab(rng));
    double x = ux(rng);
    double want = beta_oracle(x, a, b);
    double got = incomplete_beta(x, a, b);
    if (want < 1e-300) continue; // below double range, relative error meaningless
    double rel = std::fabs(got - want) / want;
    worst = std::max(worst, rel);
    ASSERT_LE(rel, 1e-10) << "x=" << x << " a=" << a << " b=" << b << " got " << got << " want " << want;
  }
  std::ostringstream os;
  os << std::scientific << worst;
  RecordProperty("worst_relative_error", os.str());
}

TEST(StudentT, TwoSidedTail) {
  // scipy: 2 * t.sf(1.72, 16)
  EXPECT_NEAR(student_t_two_sided(1.72, 16), 0.10471216756872126, 1e-12);
  EXPECT_NEAR(student_t_two_sided(-1.72, 16), 0.10471216756872126, 1e-12);
  EXPECT_NEAR(student_t_two_sided(1.72, 16), 0.105, 0.002);
  EXPECT_EQ(student_t_two_sided(0, 5), 1);
  EXPECT_EQ(student_t_two_sided(INFINITY, 5), 0);
  // df = 1 is Cauchy: P(|T| > 1) = 1/2
  EXPECT_NEAR(student_t_two_sided(1, 1), 0.5, 1e-14);
}

TEST(StudentT, AgreesWithDensityQuadrature) {
  EXPECT_NEAR(labbook::testing::t_tail_oracle(1.72, 16), 0.10471216756872126, 1e-12);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ut(0, 8), udf(1, 60);
  for (int i = 0; i < 500; ++i) {
    double t = ut(rng), df = udf(rng);
    double want = labbook::testing::t_tail_oracle(t, df);
    EXPECT_LE(std::fabs(student_t_two_sided(t, df) - want), 1e-10 * want) << "t=" << t << " df=" << df;
  }
}

TEST(Normal, TwoSidedTail) {
  EXPECT_NEAR(normal_two_sided(1.959963984540054), 0.05, 1e-14);
  EXPECT_EQ(normal_two_sided(0), 1);
}

// ---- Mann-Whitney ----

TEST(MannWhitney, SymmetricSamples) {
  for (auto m : {MwuMethod::exact, MwuMethod::asymptotic_cc}) {
    auto r = mann_whitney_u({1, 2, 3}, {1, 2, 3}, m);
    EXPECT_EQ(r.u, 4.5);
    EXPECT_EQ(r.u_min, 4.5);
    EXPECT_EQ(r.p, 1.0);
  }
}

TEST(MannWhitney, HandCountedPairs) {
  // a loses all four pairs
  auto r = mann_whitney_u({1, 2}, {3, 4}, MwuMethod::exact);
  EXPECT_EQ(r.u, 0);
  EXPECT_NEAR(r.p, 1.0 / 3.0, 1e-15); // 2 of the 6 splits are as extreme
  EXPECT_EQ(mann_whitney_u({3, 4}, {1, 2}).u, 4);
}

TEST(MannWhitney, PublishedStatisticCrossCheck) {
  // U = 16.5 with n1 = n2 = 9, tie-free variance
  double p = mwu_asymptotic_p(16.5, 9, 9);
  double z = (16.5 + 0.5 - 40.5) / std::sqrt(128.25);
  EXPECT_NEAR(p, std::erfc(std::fabs(z) / std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(p, 0.0379, 0.0005);
  EXPECT_NEAR(p, 0.037, 1e-3);
}

TEST(MannWhitney, MatchesScipyOnTieFreeSample) {
  std::vector<double> a{1.1, 2.3, 3.5, 4.2, 8.0, 9.9, 10.1};
  std::vector<double> b{5.5, 6.1, 7.7, 11.2, 12.5, 13.0, 14.4};
  auto r = mann_whitney_u(a, b, MwuMethod::exact);
  EXPECT_EQ(r.u, 9);
  EXPECT_NEAR(r.p, 0.05303030303030303, 1e-14);
}

TEST(MannWhitney, Preconditions) {
  EXPECT_ERRC(mann_whitney_u({}, {1}), Errc::invalid_input);
  EXPECT_ERRC(mann_whitney_u({1}, {NAN}), Errc::invalid_input);
  std::vector<double> big(11, 1.0);
  EXPECT_ERRC(mann_whitney_u(big, big, MwuMethod::exact), Errc::invalid_input);
  EXPECT_NO_THROW(mann_whitney_u(big, big));
  // single values are allowed
  EXPECT_EQ(mann_whitney_u({5}, {1, 2, 3}).u, 3);
}

TEST(MannWhitney, UOfBothOrdersSumsToProduct) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(1, 12);
  std::uniform_int_distribution<int> val(0, 6); // plenty of ties
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(len(rng)));
    std::vector<double> b(static_cast<std::size_t>(len(rng)));
    for (auto& x : a) x = val(rng);
    for (auto& x : b) x = val(rng);
    auto ab = mann_whitney_u(a, b);
    auto ba = mann_whitney_u(b, a);
    ASSERT_EQ(ab.u + ba.u, static_cast<double>(a.size() * b.size()));
    ASSERT_EQ(ab.p, ba.p);
    ASSERT_GE(ab.p, 0.0);
    ASSERT_LE(ab.p, 1.0);
    // U counts pairwise wins, ties half
    double wins = 0;
    for (double x : a) {
      for (double y : b) wins += x > y ? 1.0 : x == y ? 0.5 : 0.0;
    }
    ASSERT_EQ(ab.u, wins);
  }
}

TEST(MannWhitney, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> len(2, 10);
  for (int trial = 0; trial < 500; ++trial) {
    auto a = random_tie_free(rng, static_cast<std::size_t>(len(rng)));
    auto b = random_tie_free(rng, static_cast<std::size_t>(len(rng)));
    auto base = mann_whitney_u(a, b);
    auto f = [](double x) { return std::exp(x / 50) * 3 - 7; };
    auto g = [](double x) { return std::cbrt(x); };
    for (auto* t : {+f, +g}) {
      std::vector<double> ta, tb;
      for (double x : a) ta.push_back(t(x));
      for (double x : b) tb.push_back(t(x));
      auto r = mann_whitney_u(ta, tb);
      ASSERT_EQ(r.u, base.u);
      ASSERT_EQ(r.p, base.p);
    }
  }
}

TEST(MannWhitney, ExactAndAsymptoticAgreeForModerateSamples) {
  std::mt19937_64 rng(13);
  double worst = 0;
  for (std::size_t n = 5; n <= 8; ++n) {
    for (int trial = 0; trial < 250; ++trial) {
      auto a = random_tie_free(rng, n);
      auto b = random_tie_free(rng, n);
      double pe = mann_whitney_u(a, b, MwuMethod::exact).p;
      double pa = mann_whitney_u(a, b, MwuMethod::asymptotic_cc).p;
      worst = std::max(worst, std::fabs(pe - pa));
      ASSERT_LE(std::fabs(pe - pa), 0.02) << "n=" << n;
    }
  }
  RecordProperty("worst_gap", std::to_string(worst));
}

// ---- t-test ----

TEST(TTest, IdenticalSamples) {
  std::vector<double> a{1, 4, 2, 8, 5};
  for (auto v : {Variance::pooled, Variance::welch}) {
    auto r = t_test_ind(a, a, v);
    EXPECT_EQ(r.t, 0);
    EXPECT_EQ(r.p, 1);
  }
}

TEST(TTest, ConstantSamples) {
  auto same = t_test_ind({3, 3, 3}, {3, 3});
  EXPECT_EQ(same.t, 0);
  EXPECT_EQ(same.p, 1);
  auto apart = t_test_ind({3, 3, 3}, {4, 4});
  EXPECT_TRUE(std::isinf(apart.t));
  EXPECT_LT(apart.t, 0);
  EXPECT_EQ(apart.p, 0);
}

TEST(TTest, WelchReducesToPooled) {
  std::vector<double> a{1, 2, 3, 4, 5};
  std::vector<double> b{3, 4, 5, 6, 7};
  auto p = t_test_ind(a, b, Variance::pooled);
  auto w = t_test_ind(a, b, Variance::welch);
  EXPECT_NEAR(p.t, w.t, 1e-9);
  EXPECT_NEAR(p.df, w.df, 1e-9);
  EXPECT_NEAR(p.df, 8, 1e-12);
  EXPECT_NEAR(p.t, -2.0, 1e-12); // mean diff -2, se sqrt(2.5 * 0.4) = 1
}

TEST(TTest, NeedsTwoPerGroup) {
  EXPECT_ERRC(t_test_ind({1}, {1, 2}), Errc::invalid_input);
  EXPECT_ERRC(t_test_ind({1, 2}, {}), Errc::invalid_input);
}

// ---- group comparison ----

TEST(Compare, IdenticalGroups) {
  std::vector<double> a{1, 5, 3, 9};
  auto g = compare_groups("x", "a", a, "b", a);
  EXPECT_EQ(g.mwu.u, 8.0); // n^2 / 2
  ASSERT_TRUE(g.t);
  EXPECT_EQ(g.t->t, 0);
  EXPECT_EQ(g.median_a, 4);
}

TEST(Compare, SingleValueGroupRefusesTTestOnly) {
  auto g = compare_groups("x", "a", {2}, "b", {1, 3, 4});
  EXPECT_FALSE(g.t);
  EXPECT_FALSE(g.t_refused.empty());
  EXPECT_EQ(g.mwu.u, 1);
  auto text = comparisons_to_text({g});
  EXPECT_NE(text.find("at least two"), std::string::npos);
  EXPECT_TRUE(comparisons_to_json({g})[0]["t_test"].is_null());
}

TEST(Compare, NineVersusNineAgainstScipy) {
  auto data = grouped_from_csv_file(fixture_path("tam_9v9.csv"));
  ASSERT_EQ(data.groups, (std::vector<std::string>{"labbook", "baseline"}));
  auto rows = compare_all(data);
  ASSERT_EQ(rows.size(), 2u);
  // scipy.stats.mannwhitneyu(method="asymptotic") and ttest_ind, scipy 1.15
  EXPECT_EQ(rows[0].variable, "pu");
  EXPECT_EQ(rows[0].mwu.u, 61);
  EXPECT_NEAR(rows[0].mwu.p, 0.07616596550896236, 1e-12);
  EXPECT_NEAR(rows[0].t->t, 1.8757873952505775, 1e-12);
  EXPECT_NEAR(rows[0].t->p, 0.07905125526669322, 1e-12);
  EXPECT_NEAR(rows[0].median_a, 77.77777777777779, 1e-12);
  EXPECT_NEAR(rows[0].median_b, 63.888888888888886, 1e-12);
  EXPECT_EQ(rows[1].mwu.u, 58);
  EXPECT_NEAR(rows[1].mwu.p, 0.12747958405698492, 1e-12);
  EXPECT_NEAR(rows[1].t->t, 1.5909902576697286, 1e-12);
  EXPECT_NEAR(rows[1].t->p, 0.13117364019334224, 1e-12);

  auto welch = compare_all(data, {MwuMethod::asymptotic_cc, Variance::welch});
  EXPECT_NEAR(welch[0].t->p, 0.0837480348472945, 1e-12);
  EXPECT_NEAR(welch[1].t->p, 0.1372718501511675, 1e-12);

  // exact: scipy.stats.permutation_test over all 48620 splits
  auto exact = compare_all(data, {MwuMethod::exact, Variance::pooled});
  EXPECT_NEAR(exact[0].mwu.p, 0.07104072398190045, 1e-12);
  EXPECT_NEAR(exact[1].mwu.p, 0.12361168243521185, 1e-12);
}

TEST(Compare, GoldenOutputs) {
  auto rows = compare_all(grouped_from_csv_file(fixture_path("tam_9v9.csv")));
  EXPECT_EQ(comparisons_to_text(rows), read_file(fixture_path("tam_9v9.golden.txt")));
  EXPECT_EQ(comparisons_to_csv(rows), read_file(fixture_path("tam_9v9.golden.csv")));
  auto j = comparisons_to_json(rows);
  EXPECT_EQ(parse_json(compact_dump(j), "roundtrip"), j);
}

TEST(Compare, InputErrors) {
  TempDir d;
  EXPECT_ERRC(grouped_from_csv_file(d / "missing.csv"), Errc::not_found);
  auto header = std::string("participant_id,group,item1,item2,item3,item4,item5,item6,item7,item8,item9,item10,item11,item12\n");
  EXPECT_ERRC(grouped_from_tam_csv(header + "p1,a,1,1,1,1,1,1,1,1,1,1,1,1\n", "one-group"), Errc::invalid_input);
  EXPECT_ERRC(grouped_from_tam_csv(header + "p1,a,1,1,1,1,1,1,1,1,1,1,1,1\np2,b,1,1,1,1,1,1,1,1,1,1,1,1\n"
                                            "p3,c,1,1,1,1,1,1,1,1,1,1,1,1\n",
                                   "three"),
              Errc::invalid_input);
}

// ---- repository metrics ----

TEST(Metrics, FreshRepoIsAllZero) {
  TempDir d;
  auto s = session::Session::start(d / "r");
  EXPECT_EQ(repo_metrics(s.repo()), UsageMetrics{});
}

TEST(Metrics, ScriptedFixture) {
  TempDir d;
  auto s = labbook::testing::build_metrics_fixture(d / "r");
  auto m = repo_metrics(s.repo());
  EXPECT_EQ(m.measurement_interactions, 4);
  EXPECT_EQ(m.mindmap_saves, 2);
  EXPECT_EQ(m.mindmap_states_final, 2);
  EXPECT_EQ(m.mindmap_states_cumulative, 2);
  EXPECT_EQ(m.annotated_states, 2);
  EXPECT_EQ(m.annotation_chars, 17);
  EXPECT_EQ(repo_metrics(d / "r"), m);
}

TEST(Metrics, BranchesCountOnceAndRedoCountsWhenItChangesMeasurements) {
  TempDir d;
  auto s = labbook::testing::build_metrics_fixture(d / "r");
  auto history = s.repo().log(s.repo().resolve_ref("main"));
  // oldest first: root, 3 adds, remove, 2 map saves
  std::reverse(history.begin(), history.end());
  ASSERT_EQ(history.size(), 7u);
  s.restore(history[1].id);
  sim::ClientState cs;
  cs.apply_snapshot(s.current());
  auto r = s.record_interaction(cs.place_marker({7, 7, 4}, "branch marker"));
  ASSERT_TRUE(r.created_branch);
  EXPECT_EQ(repo_metrics(s.repo()).measurement_interactions, 5);
  s.redo(history[3].id); // re-adds the third marker here
  auto m = repo_metrics(s.repo());
  EXPECT_EQ(m.measurement_interactions, 6);
  // the new branch carries the root's empty mind map at HEAD
  EXPECT_EQ(m.mindmap_states_final, 0);
  EXPECT_EQ(m.mindmap_states_cumulative, 2);
  EXPECT_EQ(m.mindmap_saves, 2);
}

TEST(Metrics, SurviveBundleRoundTrip) {
  TempDir d;
  auto s = labbook::testing::build_metrics_fixture(d / "r");
  auto bytes = provstore::export_bundle_bytes(s.repo());
  auto copy = provstore::import_bundle_bytes(bytes, d / "copy");
  EXPECT_EQ(repo_metrics(copy), repo_metrics(s.repo()));
}

TEST(Metrics, CorruptRepoIsRepoError) {
  TempDir d;
  { labbook::testing::build_metrics_fixture(d / "r"); }
  // drop one object file
  for (const auto& e : std::filesystem::recursive_directory_iterator(d / "r" / "objects")) {
    if (e.is_regular_file()) {
      std::filesystem::remove(e.path());
      break;
    }
  }
  EXPECT_ERRC(repo_metrics(d / "r"), Errc::repo_error);
  EXPECT_ERRC(repo_metrics(d / "nothing"), Errc::repo_error);
}

TEST(Metrics, CodePoints) {
  EXPECT_EQ(count_code_points(""), 0);
  EXPECT_EQ(count_code_points("abc"), 3);
  EXPECT_EQ(count_code_points("\xc3\xa9t\xc3\xa9"), 3);
  EXPECT_EQ(count_code_points("\xf0\x9f\x8c\x8b"), 1);
  EXPECT_EQ(count_code_points("\xff\xfe"), 2);
}
