// labbook: command-line entry point. Exit 0 on success, 1 on domain errors
// ("error[CODE]: message" on stderr), 2 on usage errors.

#include <csignal>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <pthread.h>

#include <CLI11.hpp>

#include "demo.hpp"
#include "labbook/analysis/compare.hpp"
#include "labbook/analysis/metrics.hpp"
#include "labbook/analysis/t_test.hpp"
#include "labbook/analysis/tam.hpp"
#include "labbook/canonical_json.hpp"
#include "labbook/error.hpp"
#include "labbook/protocol/server.hpp"
#include "labbook/provstore/bundle.hpp"
#include "labbook/provstore/verify.hpp"
#include "labbook/session/session.hpp"
#include "labbook/sim/runner.hpp"
#include "labbook/vftsim/scene.hpp"

namespace fs = std::filesystem;
using namespace labbook;

namespace {

// Flags that mirror protocol::Config. Only flags actually given override the
// file and environment.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  bool fixed_clock = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key=value config file");
    add(app, "--repo-root", "repo_root", "directory holding repositories");
    add(app, "--port", "port", "tool link port");
    add(app, "--http-port", "http_port", "HTTP API port");
    add(app, "--bind", "bind", "listen address");
    add(app, "--author", "author", "author recorded on commits");
    add(app, "--clock", "clock", "real or fixed");
    add(app, "--clock-start", "clock_start", "first fixed-clock timestamp (unix seconds)");
    app->add_flag("--fixed-clock", fixed_clock, "deterministic timestamps (same as --clock fixed)");
  }

  protocol::Config resolve() const {
    protocol::Config config;
    if (!config_file.empty()) protocol::apply_config_file(config, config_file);
    protocol::apply_environment(config, protocol::labbook_environment());
    for (const auto& [key, value] : values) protocol::set_config_key(config, key, value, "flag");
    if (fixed_clock) config.clock = protocol::ClockMode::fixed;
    return config;
  }

private:
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

std::shared_ptr<Clock> clock_for(bool fixed) {
  if (fixed) return std::make_shared<FixedClock>();
  return std::make_shared<SystemClock>();
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

// ---- serve ----

int cmd_serve(const ConfigFlags& flags) {
  auto config = flags.resolve();
  protocol::validate_config(config);

  // Block before any server thread exists so only sigwait sees the signals.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  protocol::Server server(config);
  server.start();
  std::cout << "tool link on " << config.bind << ':' << server.tool_port() << ", HTTP API on http://"
            << config.bind << ':' << server.http_port() << "/api/v1, repositories in " << config.repo_root.string()
            << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  std::cout << "stopping" << std::endl;
  server.stop();
  return 0;
}

// ---- repo ----

int cmd_repo_init(const fs::path& path, const std::string& author, bool fixed) {
  std::error_code ec;
  if (fs::exists(path) && !(fs::is_directory(path) && fs::is_empty(path, ec))) {
    throw Error(Errc::already_exists, path.string() + " exists and is not an empty directory");
  }
  session::SessionOptions options;
  options.author = author;
  options.clock = clock_for(fixed);
  auto s = session::Session::start(path, options);
  std::cout << s.head().commit.hex() << '\n';
  return 0;
}

int cmd_repo_log(const fs::path& path, bool all, bool json) {
  auto repo = provstore::Repository::open(path);
  auto commits = all ? repo.log_all() : repo.log(repo.head().commit);
  Json out = Json::array();
  for (const auto& c : commits) {
    auto first_line = c.message.substr(0, c.message.find('\n'));
    if (json) {
      Json parents = Json::array();
      for (const auto& p : c.parents) parents.push_back(p.hex());
      out.push_back({{"id", c.id.hex()},
                     {"kind", std::string(provstore::kind_name(c.kind))},
                     {"timestamp", format_rfc3339(c.timestamp)},
                     {"author", c.author},
                     {"parents", parents},
                     {"message", c.message}});
    } else {
      std::cout << c.id.hex() << ' ' << provstore::kind_name(c.kind) << ' ' << format_rfc3339(c.timestamp) << ' '
                << first_line << '\n';
    }
  }
  if (json) print_json(out);
  return 0;
}

int cmd_repo_verify(const fs::path& path, bool json) {
  auto repo = provstore::Repository::open(path);
  auto report = provstore::verify(repo);
  if (json) {
    Json findings = Json::array();
    for (const auto& f : report.findings) {
      findings.push_back({{"check", f.check}, {"subject", f.subject}, {"detail", f.detail}});
    }
    print_json({{"ok", report.ok()}, {"objects_checked", report.objects_checked}, {"findings", findings}});
  } else {
    for (const auto& f : report.findings) std::cout << f.check << ' ' << f.subject << ": " << f.detail << '\n';
    if (report.ok()) std::cout << "ok: " << report.objects_checked << " objects\n";
  }
  if (!report.ok()) {
    std::cerr << "error[" << code_name(Errc::integrity_error) << "]: " << report.findings.size()
              << " finding(s) in " << path.string() << '\n';
    return 1;
  }
  return 0;
}

int cmd_repo_metrics(const fs::path& path, bool json) {
  auto m = analysis::repo_metrics(path);
  if (json) {
    print_json(analysis::metrics_to_json(m));
    return 0;
  }
  std::cout << "mindmap_saves              " << m.mindmap_saves << '\n'
            << "mindmap_states_final       " << m.mindmap_states_final << '\n'
            << "mindmap_states_cumulative  " << m.mindmap_states_cumulative << '\n'
            << "measurement_interactions   " << m.measurement_interactions << '\n'
            << "annotated_states           " << m.annotated_states << '\n'
            << "annotation_chars           " << m.annotation_chars << '\n';
  return 0;
}

// ---- sim ----

struct SimArgs {
  std::string script;
  std::string scene = "ramp";
  std::string host = "127.0.0.1";
  std::uint16_t port = 7341;
  std::uint16_t http_port = 7342;
  std::string repo = "default";
  bool create = false;
  bool load = false;
  bool json = false;
  double timeout = 30;
};

int cmd_sim_run(const SimArgs& a) {
  auto scene = vftsim::resolve_scene(a.scene);
  auto steps = sim::load_script(a.script);
  sim::RunOptions o;
  o.host = a.host;
  o.tool_port = a.port;
  o.http_port = a.http_port;
  o.repo = a.repo;
  o.mode = a.create ? sim::RepoMode::create : a.load ? sim::RepoMode::load : sim::RepoMode::automatic;
  o.scene = scene.name;
  o.reply_timeout = std::chrono::milliseconds(static_cast<long>(a.timeout * 1000));
  if (!a.json) o.on_line = [](const std::string& line) { std::cout << line << std::endl; };
  auto r = sim::run_script(steps, o);
  if (a.json) {
    print_json({{"repo", a.repo},
                {"committed_acks", r.committed_acks},
                {"commits", r.commits},
                {"failure", r.failure ? Json(*r.failure) : Json(nullptr)},
                {"transcript", r.transcript}});
  }
  if (r.failure) {
    std::cerr << "error[" << code_name(Errc::script_error) << "]: " << a.script << ": " << *r.failure << '\n';
    return 1;
  }
  return 0;
}

// ---- stats ----

enum class Format { text, csv, json };

int cmd_stats_tam(const fs::path& path, Format format) {
  auto text = [&] {
    try {
      return provstore::read_file(path);
    } catch (const Error&) {
      throw Error(Errc::not_found, "cannot read " + path.string());
    }
  }();
  auto rows = analysis::parse_tam_csv(text, path.string());

  std::vector<std::string> groups;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_group;
  std::vector<analysis::TamScores> scores;
  for (const auto& r : rows) {
    auto s = analysis::score_tam(r.response);
    scores.push_back(s);
    if (!by_group.count(r.group)) groups.push_back(r.group);
    by_group[r.group].first.push_back(s.pu);
    by_group[r.group].second.push_back(s.peou);
  }

  if (format == Format::json) {
    Json participants = Json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      participants.push_back(
          {{"participant_id", rows[i].participant}, {"group", rows[i].group}, {"pu", scores[i].pu}, {"peou", scores[i].peou}});
    }
    Json medians = Json::object();
    for (const auto& g : groups) {
      medians[g] = {{"pu", analysis::median(by_group[g].first)}, {"peou", analysis::median(by_group[g].second)}};
    }
    print_json({{"participants", participants}, {"medians", medians}});
  } else if (format == Format::csv) {
    std::cout << "participant_id,group,pu,peou\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::cout << rows[i].participant << ',' << rows[i].group << ',' << fixed2(scores[i].pu) << ','
                << fixed2(scores[i].peou) << '\n';
    }
  } else {
    std::size_t pw = 11, gw = 5;
    for (const auto& r : rows) {
      pw = std::max(pw, r.participant.size());
      gw = std::max(gw, r.group.size());
    }
    std::cout << std::left << std::setw(pw + 2) << "participant" << std::setw(gw + 2) << "group" << std::right
              << std::setw(8) << "PU" << std::setw(8) << "PEOU" << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::cout << std::left << std::setw(pw + 2) << rows[i].participant << std::setw(gw + 2) << rows[i].group
                << std::right << std::setw(8) << fixed2(scores[i].pu) << std::setw(8) << fixed2(scores[i].peou)
                << '\n';
    }
    for (const auto& g : groups) {
      std::cout << std::left << std::setw(pw + 2) << "median" << std::setw(gw + 2) << g << std::right << std::setw(8)
                << fixed2(analysis::median(by_group[g].first)) << std::setw(8)
                << fixed2(analysis::median(by_group[g].second)) << '\n';
    }
  }
  return 0;
}

int cmd_stats_compare(const fs::path& path, bool exact, bool welch, Format format) {
  auto data = analysis::grouped_from_csv_file(path);
  analysis::CompareOptions o;
  if (exact) o.mwu = analysis::MwuMethod::exact;
  if (welch) o.variance = analysis::Variance::welch;
  auto rows = analysis::compare_all(data, o);
  if (format == Format::json) print_json(analysis::comparisons_to_json(rows));
  else if (format == Format::csv) std::cout << analysis::comparisons_to_csv(rows);
  else std::cout << analysis::comparisons_to_text(rows);
  return 0;
}

// ---- demo ----

int cmd_demo(const ConfigFlags& flags, const std::string& out, const std::string& work_dir, bool verbose,
              bool json) {
  cli::DemoOptions o;
  o.config = flags.resolve();
  o.bundle = out;
  if (!work_dir.empty()) o.work_dir = work_dir;
  o.echo_transcript = verbose && !json;
  auto r = cli::run_demo(o);
  if (json) {
    print_json({{"bundle", out},
                {"bundle_bytes", r.bundle_bytes},
                {"bundle_sha1", r.bundle_sha1},
                {"commits", r.commits},
                {"branches", r.branches},
                {"metrics", analysis::metrics_to_json(r.metrics)}});
    return 0;
  }
  std::cout << "commits   " << r.commits << " on " << r.branches << " branch(es)\n"
            << "bundle    " << out << " (" << r.bundle_bytes << " bytes, sha1 " << r.bundle_sha1 << ")\n";
  const auto& m = r.metrics;
  std::cout << "metrics   mindmap_saves=" << m.mindmap_saves << " mindmap_states_final=" << m.mindmap_states_final
            << " mindmap_states_cumulative=" << m.mindmap_states_cumulative
            << " measurement_interactions=" << m.measurement_interactions
            << " annotated_states=" << m.annotated_states << " annotation_chars=" << m.annotation_chars << '\n';
  return 0;
}

int report(const Error& e) {
  std::cerr << "error[" << code_name(e.code()) << "]: " << e.what() << '\n';
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"labbook: provenance-tracking lab notebook for a visualization tool"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  // serve
  ConfigFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "run the tool link and HTTP API until SIGINT/SIGTERM");
  serve_flags.attach(serve);

  // repo
  auto* repo = app.add_subcommand("repo", "inspect and move repositories");
  repo->require_subcommand(1);
  std::string repo_path, bundle_path, author = "labbook";
  bool fixed = false, all = false, json = false;

  auto* init = repo->add_subcommand("init", "create a repository with its session_start commit");
  init->add_option("path", repo_path)->required();
  init->add_option("--author", author, "root commit author");
  init->add_flag("--fixed-clock", fixed, "deterministic timestamp");

  auto* log = repo->add_subcommand("log", "list commits, newest first");
  log->add_option("path", repo_path)->required();
  log->add_flag("--all", all, "every branch, not only HEAD's history");
  log->add_flag("--json", json);

  auto* verify = repo->add_subcommand("verify", "check digests, tree order, parents and refs");
  verify->add_option("path", repo_path)->required();
  verify->add_flag("--json", json);

  auto* exp = repo->add_subcommand("export", "write a bundle archive");
  exp->add_option("path", repo_path)->required();
  exp->add_option("bundle", bundle_path)->required();

  auto* imp = repo->add_subcommand("import", "unpack and verify a bundle into a new repository");
  imp->add_option("bundle", bundle_path)->required();
  imp->add_option("path", repo_path)->required();

  auto* met = repo->add_subcommand("metrics", "usage metrics of one repository");
  met->add_option("path", repo_path)->required();
  met->add_flag("--json", json);

  // sim
  auto* sim_cmd = app.add_subcommand("sim", "scripted visualization-tool client");
  sim_cmd->require_subcommand(1);
  SimArgs sim_args;
  auto* run = sim_cmd->add_subcommand("run", "run a script against a server");
  run->add_option("--script", sim_args.script, "script file")->required();
  run->add_option("--scene", sim_args.scene, "built-in scene name or scene JSON file");
  run->add_option("--host", sim_args.host);
  run->add_option("--port", sim_args.port, "tool link port");
  run->add_option("--http-port", sim_args.http_port, "HTTP API port (used by restore steps)");
  run->add_option("--repo", sim_args.repo, "repository name on the server");
  auto* create_flag = run->add_flag("--create", sim_args.create, "always create the repository");
  run->add_flag("--load", sim_args.load, "only load an existing repository")->excludes(create_flag);
  run->add_option("--timeout", sim_args.timeout, "seconds to wait for each reply")->check(CLI::PositiveNumber);
  run->add_flag("--json", sim_args.json, "print a summary object instead of the live transcript");

  // stats
  auto* stats = app.add_subcommand("stats", "questionnaire scores and group comparisons");
  stats->require_subcommand(1);
  std::string csv_path;
  bool as_csv = false, exact = false, welch = false;
  auto* tam = stats->add_subcommand("tam", "score TAM questionnaires");
  tam->add_option("file", csv_path)->required();
  auto* tam_json = tam->add_flag("--json", json);
  tam->add_flag("--csv", as_csv)->excludes(tam_json);
  auto* cmp = stats->add_subcommand("compare", "Mann-Whitney U and t-test between two groups");
  cmp->add_option("file", csv_path, "TAM items or participant_id,group,repo_path")->required();
  cmp->add_flag("--exact", exact, "exact permutation p for the U test");
  cmp->add_flag("--welch", welch, "Welch's unequal-variance t-test");
  auto* cmp_json = cmp->add_flag("--json", json);
  cmp->add_flag("--csv", as_csv)->excludes(cmp_json);

  // demo
  ConfigFlags demo_flags;
  std::string demo_out = "labbook-demo.zip", work_dir;
  bool verbose = false;
  auto* demo = app.add_subcommand("demo", "scripted end-to-end session: serve, sim, export, metrics");
  demo_flags.attach(demo);
  demo->add_option("--out", demo_out, "bundle to write");
  demo->add_option("--work-dir", work_dir, "keep the demo repository here");
  demo->add_flag("-v,--verbose", verbose, "echo the tool-link transcript");
  demo->add_flag("--json", json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const Format format = json ? Format::json : as_csv ? Format::csv : Format::text;
  try {
    if (*serve) return cmd_serve(serve_flags);
    if (*init) return cmd_repo_init(repo_path, author, fixed);
    if (*log) return cmd_repo_log(repo_path, all, json);
    if (*verify) return cmd_repo_verify(repo_path, json);
    if (*exp) {
      provstore::export_bundle(provstore::Repository::open(repo_path), bundle_path);
      return 0;
    }
    if (*imp) {
      auto r = provstore::import_bundle(bundle_path, repo_path);
      std::cout << r.head().commit.hex() << '\n';
      return 0;
    }
    if (*met) return cmd_repo_metrics(repo_path, json);
    if (*run) return cmd_sim_run(sim_args);
    if (*tam) return cmd_stats_tam(csv_path, format);
    if (*cmp) return cmd_stats_compare(csv_path, exact, welch, format);
    if (*demo) return cmd_demo(demo_flags, demo_out, work_dir, verbose, json);
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error[INTERNAL]: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
