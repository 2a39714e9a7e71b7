// Acceptance run: one line per criterion, "PASS" or "FAIL", with the measured
// value and the wall time against its budget. Exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "labbook/analysis/mann_whitney.hpp"
#include "labbook/analysis/metrics.hpp"
#include "labbook/analysis/special.hpp"
#include "labbook/analysis/tam.hpp"
#include "labbook/error.hpp"
#include "labbook/protocol/frame.hpp"
#include "labbook/protocol/messages.hpp"
#include "labbook/protocol/net.hpp"
#include "labbook/protocol/server.hpp"
#include "labbook/protocol/server_context.hpp"
#include "labbook/protocol/tool_session.hpp"
#include "labbook/provstore/bundle.hpp"
#include "labbook/provstore/objects.hpp"
#include "labbook/provstore/verify.hpp"
#include "labbook/session/session.hpp"
#include "labbook/session/snapshot.hpp"
#include "labbook/sim/client_state.hpp"
#include "labbook/vftsim/geometry.hpp"
#include "metrics_fixture.hpp"
#include "oracles.hpp"
#include "spawn.hpp"
#include "test_util.hpp"

using namespace labbook;
using labbook::testing::TempDir;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome fail(std::string why) { return {false, std::move(why)}; }

// ---- hash compatibility ----

Outcome hash_compatibility() {
  auto empty = provstore::hash_object(provstore::ObjectKind::blob, "").hex();
  if (empty != "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391") return fail("empty blob hashed to " + empty);

  TempDir dir;
  std::mt19937_64 rng(100);
  std::vector<std::string> argv{"/usr/bin/env", "git", "hash-object", "--no-filters"};
  std::vector<std::string> expected;
  for (int i = 0; i < 100; ++i) {
    // Mix of empty, tiny, text-like and binary files up to 64 KiB.
    std::size_t cap = i % 10 == 0 ? 0 : i % 3 == 0 ? 65536 : 300;
    auto bytes = labbook::testing::random_bytes(rng, cap);
    if (i % 4 == 1) std::replace_if(bytes.begin(), bytes.end(), [](char c) { return c < 32 || c > 126; }, '\n');
    auto path = dir / ("f" + std::to_string(i));
    std::ofstream(path, std::ios::binary) << bytes;
    argv.push_back(path.string());
    expected.push_back(provstore::hash_object(provstore::ObjectKind::blob, bytes).hex());
  }
  auto r = labbook::testing::run_process(argv, dir.path());
  if (r.exit_code != 0) return fail("git hash-object failed: " + r.err);
  std::istringstream lines(r.out);
  std::string line;
  std::size_t i = 0, mismatches = 0;
  while (std::getline(lines, line)) mismatches += i < expected.size() && line != expected[i++];
  if (i != expected.size()) return fail("git printed " + std::to_string(i) + " ids for 100 files");
  if (mismatches) return fail(std::to_string(mismatches) + " of 100 files differ from git");
  return {true, "empty blob ok, 100/100 files match git"};
}

// ---- demo determinism ----

Outcome demo_determinism() {
  TempDir dir;
  std::string bytes[2];
  for (int k = 0; k < 2; ++k) {
    auto out = dir / ("run" + std::to_string(k) + ".zip");
    auto r = labbook::testing::run_process({LABBOOK_CLI_PATH, "demo", "--fixed-clock", "--out", out.string()},
                                           dir.path());
    if (r.exit_code != 0) return fail("demo exited " + std::to_string(r.exit_code) + ": " + r.err);
    bytes[k] = labbook::testing::slurp(out);
  }
  if (bytes[0].empty()) return fail("empty bundle");
  if (bytes[0] != bytes[1]) return fail("bundles differ");
  return {true, "2 runs, " + std::to_string(bytes[0].size()) + " identical bytes"};
}

// ---- restore soundness ----

Outcome restore_soundness() {
  TempDir dir;
  session::SessionOptions opts;
  opts.clock = std::make_shared<FixedClock>();
  auto s = session::Session::start(dir / "r", opts);
  std::mt19937_64 rng(50);
  sim::ClientState cs;
  auto record = [&](const session::InteractionEvent& e) { s.record_interaction(e); };
  std::uniform_real_distribution<double> coord(-20, 20);
  int guard = 0;
  while (s.repo().log_all().size() < 50 && ++guard < 1000) {
    cs.apply_snapshot(s.current());
    int op = std::uniform_int_distribution<int>(0, 9)(rng);
    try {
      if (op <= 2) {
        record(cs.place_marker({coord(rng), coord(rng), coord(rng)}, "m" + std::to_string(rng() % 100)));
      } else if (op == 3) {
        record(cs.place_distance({coord(rng), coord(rng), 0}, {coord(rng), coord(rng), 1}));
      } else if (op == 4 && !cs.measurements().empty()) {
        record(cs.remove_measurement(cs.measurements()[rng() % cs.measurements().size()].id));
      } else if (op == 5) {
        cs.set_camera({{coord(rng), coord(rng), 10}, {1, 0, 0, 0}});
        record(cs.bookmark());
      } else if (op == 6) {
        auto log = s.repo().log_all();
        s.restore(log[rng() % log.size()].id);
      } else if (op == 7) {
        auto log = s.repo().log_all();
        s.redo(log[rng() % log.size()].id);
      } else if (op == 8) {
        auto map = s.current().mindmap;
        map.nodes.push_back({"n" + std::to_string(map.nodes.size()), session::NodeKind::state, s.head().commit,
                             coord(rng), coord(rng), "state"});
        s.save_mindmap(map);
      } else {
        s.save_notes(s.current().notes + "obs " + std::to_string(rng() % 1000) + "\n");
      }
    } catch (const Error& e) {
      if (e.code() != Errc::inapplicable) throw;
    }
  }
  auto log = s.repo().log_all();
  if (log.size() != 50) return fail("session reached " + std::to_string(log.size()) + " commits");
  std::size_t branches = s.repo().list_refs().size();
  for (const auto& c : log) {
    auto instr = s.restore(c.id);
    sim::ClientState direct, wire;
    direct.apply_snapshot(instr.snapshot);
    wire.apply_snapshot_wire(protocol::snapshot_to_wire(instr.snapshot));
    if (session::snapshot_tree_id(direct.serialize()) != c.tree) return fail("direct mismatch at " + c.id.hex());
    if (session::snapshot_tree_id(wire.serialize()) != c.tree) return fail("wire mismatch at " + c.id.hex());
  }
  return {true, "50/50 commits over " + std::to_string(branches) + " branches"};
}

// ---- bundle round trip ----

Outcome bundle_round_trip() {
  std::size_t objects = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TempDir dir;
    auto repo = labbook::testing::make_random_repo(dir / "r", 1000 + seed, 1 + static_cast<int>(seed % 40));
    auto copy = provstore::import_bundle_bytes(provstore::export_bundle_bytes(repo), dir / "copy");
    if (copy.list_objects() != repo.list_objects()) return fail("objects differ, seed " + std::to_string(seed));
    if (copy.list_refs() != repo.list_refs()) return fail("refs differ, seed " + std::to_string(seed));
    if (copy.all_annotations() != repo.all_annotations()) return fail("annotations differ, seed " + std::to_string(seed));
    if (copy.head().commit != repo.head().commit || copy.head().branch != repo.head().branch) {
      return fail("HEAD differs, seed " + std::to_string(seed));
    }
    objects += repo.list_objects().size();
  }
  return {true, "100 repos, " + std::to_string(objects) + " objects preserved"};
}

// ---- strike & dip ----

double angle_gap(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

Outcome strike_dip() {
  auto f = vftsim::measure_strike_dip({0, 0, 0}, {1, 0, 1}, {0, 1, 0});
  double fixture_err = std::max({std::fabs(f.dip_deg - 45), angle_gap(f.dip_direction_deg, 270),
                                 angle_gap(f.strike_deg, 180)});
  if (fixture_err > 1e-9) return fail("plane z=x off by " + fmt("%.3g", fixture_err) + " deg");

  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(-10, 10), scale(0.01, 100), shift(-1000, 1000);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    vftsim::Point3 p[3];
    for (auto& q : p) q = {u(rng), u(rng), u(rng)};
    auto base = vftsim::measure_strike_dip(p[0], p[1], p[2]);
    auto gap = [&](const vftsim::StrikeDip& s) {
      worst = std::max({worst, std::fabs(s.dip_deg - base.dip_deg), angle_gap(s.strike_deg, base.strike_deg),
                        angle_gap(s.dip_direction_deg, base.dip_direction_deg)});
    };
    int idx[3] = {0, 1, 2};
    while (std::next_permutation(idx, idx + 3)) gap(vftsim::measure_strike_dip(p[idx[0]], p[idx[1]], p[idx[2]]));
    double k = scale(rng);
    vftsim::Point3 t{shift(rng), shift(rng), shift(rng)};
    auto move = [&](vftsim::Point3 q) { return vftsim::Point3{q.x * k + t.x, q.y * k + t.y, q.z * k + t.z}; };
    gap(vftsim::measure_strike_dip(move(p[0]), move(p[1]), move(p[2])));
  }
  if (worst > 1e-7) return fail("invariance broken by " + fmt("%.3g", worst) + " deg");
  return {true, "fixture err " + fmt("%.1e", fixture_err) + " deg, 1000 planes worst " + fmt("%.1e", worst) + " deg"};
}

// ---- Mann-Whitney ----

Outcome mwu_cross_check() {
  double p = analysis::mwu_asymptotic_p(16.5, 9, 9);
  if (std::fabs(p - 0.0379) > 0.0005) return fail("p(U=16.5) = " + fmt("%.6f", p) + ", want 0.0379 +- 0.0005");
  if (std::fabs(p - 0.037) > 1e-3) return fail("p(U=16.5) = " + fmt("%.6f", p) + " misses reported 0.037 by > 1e-3");

  // Every achievable U for n1 = n2 = n: start with all of sample a below b
  // and swap one adjacent (a, b) pair at a time, which moves U by one.
  double worst = 0;
  for (int n = 5; n <= 8; ++n) {
    std::vector<char> order(2 * n, 'b');
    std::fill(order.begin(), order.begin() + n, 'a');
    for (int step = 0; step <= n * n; ++step) {
      std::vector<double> a, b;
      for (int i = 0; i < 2 * n; ++i) (order[i] == 'a' ? a : b).push_back(i + 1);
      auto exact = analysis::mann_whitney_u(a, b, analysis::MwuMethod::exact);
      auto approx = analysis::mann_whitney_u(a, b, analysis::MwuMethod::asymptotic_cc);
      worst = std::max(worst, std::fabs(exact.p - approx.p));
      for (int i = 2 * n - 2; i >= 0; --i) {
        if (order[i] == 'a' && order[i + 1] == 'b') {
          std::swap(order[i], order[i + 1]);
          break;
        }
      }
    }
  }
  if (worst > 0.02) return fail("exact vs asymptotic gap " + fmt("%.5f", worst));
  return {true, "p(U=16.5) = " + fmt("%.5f", p) + ", exact vs asymptotic worst " + fmt("%.5f", worst)};
}

// ---- t distribution ----

Outcome t_distribution() {
  double p = analysis::student_t_two_sided(1.72, 16);
  double oracle = labbook::testing::t_tail_oracle(1.72, 16);
  if (std::fabs(p - 0.105) > 0.002) return fail("p(1.72, 16) = " + fmt("%.6f", p));
  if (std::fabs(oracle - 0.105) > 0.002 || std::fabs(p - oracle) > 1e-10) {
    return fail("p = " + fmt("%.12f", p) + " vs quadrature " + fmt("%.12f", oracle));
  }

  std::mt19937_64 rng(10000);
  std::uniform_real_distribution<double> log_ab(std::log(0.1), std::log(50.0)), ux(1e-6, 1 - 1e-6);
  double worst = 0;
  int counted = 0;
  for (int i = 0; i < 10000; ++i) {
    double a = std::exp(log_ab(rng)), b = std::exp(log_ab(rng)), x = ux(rng);
    double want = labbook::testing::beta_oracle(x, a, b);
    if (want < 1e-300) continue;
    ++counted;
    worst = std::max(worst, std::fabs(analysis::incomplete_beta(x, a, b) - want) / want);
  }
  if (worst > 1e-10) return fail("incomplete beta relative error " + fmt("%.3g", worst));
  return {true, "p(1.72, 16) = " + fmt("%.6f", p) + ", quadrature gap " + fmt("%.1e", std::fabs(p - oracle)) +
                    ", ibeta worst rel " + fmt("%.1e", worst) + " over " + std::to_string(counted) + " points"};
}

// ---- TAM lattice ----

Outcome tam_lattice() {
  // Items 1..6 are one scale, 7..12 the other. Sums 31 and 32 give means 31/6 and 32/6.
  analysis::LikertResponse r{{5, 5, 5, 5, 5, 6, 5, 5, 5, 5, 6, 6}};
  auto s = analysis::score_tam(r);
  auto two_dp = [](double v) { return fmt("%.2f", v); };
  if (two_dp(s.pu) != "69.44" || two_dp(s.peou) != "72.22") {
    return fail("got " + two_dp(s.pu) + " / " + two_dp(s.peou));
  }
  analysis::LikertResponse lo, hi;
  lo.items.fill(1);
  hi.items.fill(7);
  auto l = analysis::score_tam(lo), h = analysis::score_tam(hi);
  if (l.pu != 0 || l.peou != 0 || h.pu != 100 || h.peou != 100) return fail("endpoints not exactly 0 / 100");
  return {true, "69.44, 72.22, endpoints 0 and 100"};
}

// ---- metrics fixture ----

Outcome metrics_fixture() {
  TempDir dir;
  auto s = labbook::testing::build_metrics_fixture(dir / "fixture");
  auto m = analysis::repo_metrics(s.repo());
  std::ostringstream got;
  got << "C=" << m.measurement_interactions << " A=" << m.mindmap_saves << " B.final=" << m.mindmap_states_final
      << " D=" << m.annotated_states << " E=" << m.annotation_chars;
  bool ok = m.measurement_interactions == 4 && m.mindmap_saves == 2 && m.mindmap_states_final == 2 &&
            m.annotated_states == 2 && m.annotation_chars == 17;
  return {ok, got.str()};
}

// ---- protocol robustness ----

struct RecordingSink : protocol::FrameSink {
  std::vector<std::string> lines;
  bool closed = false;
  bool wrote_after_close = false;
  void send_line(const std::string& line) override {
    wrote_after_close |= closed;
    lines.push_back(line);
  }
  void close() override { closed = true; }
};

bool acceptable_reply(std::string line, std::string& why) {
  if (line.empty() || line.back() != '\n') {
    why = "unterminated reply";
    return false;
  }
  line.pop_back();
  auto d = protocol::decode_frame(line);
  if (!std::holds_alternative<protocol::Frame>(d)) {
    why = "undecodable reply: " + line;
    return false;
  }
  const auto& f = std::get<protocol::Frame>(d);
  if (f.type == "error") {
    if (!f.payload.contains("code") || !f.payload["code"].is_string()) {
      why = "error frame without code";
      return false;
    }
    return true;
  }
  if (f.type == "hello_ok" || f.type == "committed" || f.type == "restore") return true;
  why = "unexpected reply type " + f.type;
  return false;
}

std::string fuzz_line(std::mt19937_64& rng, std::int64_t& seq, const std::vector<Json>& pool) {
  static const std::vector<std::string> types{"hello", "create_repo", "load_repo", "event",
                                              "view_bookmark", "bye", "junk"};
  int shape = std::uniform_int_distribution<int>(0, 11)(rng);
  if (shape == 0) {
    auto line = labbook::testing::random_bytes(rng, 120);
    line.erase(std::remove(line.begin(), line.end(), '\n'), line.end());
    return line;
  }
  if (shape == 1) {
    // Valid frame with one byte flipped.
    auto line = protocol::encode_frame({"event", ++seq, pool[rng() % pool.size()]});
    line.pop_back();
    line[rng() % line.size()] ^= static_cast<char>(1 + rng() % 127);
    line.erase(std::remove(line.begin(), line.end(), '\n'), line.end());
    return line;
  }
  auto type = types[rng() % types.size()];
  std::int64_t s = rng() % 9 == 0 ? static_cast<std::int64_t>(rng() % 3) : ++seq;
  Json payload = Json::object();
  if (type == "hello" && shape % 2) payload = {{"name", shape == 3 ? Json(7) : Json("fuzz")}};
  if (type == "create_repo" || type == "load_repo") payload = {{"name", shape < 7 ? "fz" : std::string(shape, '.')}};
  if (type == "event" || type == "view_bookmark") {
    payload = pool[rng() % pool.size()];
    if (shape == 10) payload["camera"] = "bad";
    if (shape == 11) {
      payload["action"] = "remove";
      payload["measurement_id"] = "nope";
    }
  }
  auto line = protocol::encode_frame({type, s, payload});
  line.pop_back();
  return line;
}

Outcome protocol_robustness() {
  TempDir dir;
  std::vector<Json> pool;
  for (int i = 0; i < 4; ++i) {
    sim::ClientState cs;
    pool.push_back(protocol::event_to_wire(cs.place_marker({double(i), 1, 2}, "fz")));
  }
  {
    sim::ClientState cs;
    pool.push_back(protocol::event_to_wire(cs.bookmark()));
  }

  // In-process: every reply to each of 10^4 frames is inspected.
  protocol::ServerContext ctx({dir / "inproc", "fuzz", std::make_shared<FixedClock>()});
  std::mt19937_64 rng(10'000);
  std::size_t frames = 0, replies = 0, closes = 0;
  {
    std::unique_ptr<RecordingSink> sink;
    std::unique_ptr<protocol::ToolSession> conn;
    std::int64_t seq = 0;
    std::string why;
    while (frames < 10'000) {
      if (!conn || sink->closed) {
        if (conn) ++closes;
        conn.reset();
        sink = std::make_unique<RecordingSink>();
        conn = std::make_unique<protocol::ToolSession>(ctx, *sink);
        seq = 0;
      }
      auto before = sink->lines.size();
      conn->on_line(fuzz_line(rng, seq, pool));
      ++frames;
      for (auto i = before; i < sink->lines.size(); ++i, ++replies) {
        if (!acceptable_reply(sink->lines[i], why)) return fail("frame " + std::to_string(frames) + ": " + why);
      }
      if (sink->wrote_after_close) return fail("reply after close at frame " + std::to_string(frames));
    }
  }
  auto report = ctx.with_session([](session::Session& s) { return provstore::verify(s.repo()); });
  if (!report.ok()) return fail("repository no longer verifies after in-process fuzz");

  // Over TCP: pipelined bursts, including oversized lines, against a live
  // server that must still greet a well-behaved client afterwards.
  protocol::Config config;
  config.repo_root = dir / "tcp";
  config.tool_port = 0;
  config.http_port = 0;
  config.clock = protocol::ClockMode::fixed;
  protocol::Server server(config);
  server.start();
  std::size_t tcp_frames = 0;
  std::string why;
  for (int c = 0; c < 100; ++c) {
    auto sock = net::connect_tcp("127.0.0.1", server.tool_port());
    std::int64_t seq = 0;
    std::string burst;
    if (c % 2) burst += protocol::encode_frame({"hello", ++seq, {{"name", "fuzz"}}});
    int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) burst += fuzz_line(rng, seq, pool) + "\n";
    if (c % 10 == 9) burst += std::string(protocol::kMaxFrameBytes + 16, 'x');
    tcp_frames += n;
    try {
      sock.write_all(burst);
      sock.write_all(protocol::encode_frame({"bye", ++seq, Json::object()}));
    } catch (const Error&) {
      // Reset after the server closed mid-burst: a clean close.
    }
    protocol::LineReader reader;
    char buf[4096];
    auto until = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    try {
      while (std::chrono::steady_clock::now() < until) {
        if (!sock.wait_readable(std::chrono::milliseconds(200))) continue;
        auto got = sock.read_some(buf, sizeof buf);
        if (got == 0) break;
        reader.feed(std::string_view(buf, got));
        while (auto line = reader.next_line()) {
          if (!acceptable_reply(*line + "\n", why)) return fail("tcp connection " + std::to_string(c) + ": " + why);
        }
      }
    } catch (const Error&) {
    }
  }
  {
    auto sock = net::connect_tcp("127.0.0.1", server.tool_port());
    sock.write_all(protocol::encode_frame({"hello", 1, {{"name", "after"}}}));
    protocol::LineReader reader;
    char buf[4096];
    std::optional<std::string> line;
    auto until = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    while (!line && std::chrono::steady_clock::now() < until) {
      if (!sock.wait_readable(std::chrono::milliseconds(200))) continue;
      auto got = sock.read_some(buf, sizeof buf);
      if (got == 0) break;
      reader.feed(std::string_view(buf, got));
      line = reader.next_line();
    }
    if (!line || line->find("\"type\":\"hello_ok\"") == std::string::npos) {
      return fail("server did not greet a client after the TCP fuzz");
    }
  }
  server.stop();
  return {true, std::to_string(frames) + " frames in-process (" + std::to_string(replies) + " replies, " +
                    std::to_string(closes) + " closes) + " + std::to_string(tcp_frames) +
                    " over TCP, no invalid replies"};
}

} // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"hash compatibility", 5, hash_compatibility},
      {"demo determinism", 30, demo_determinism},
      {"restore soundness", 60, restore_soundness},
      {"bundle round-trip", 120, bundle_round_trip},
      {"strike & dip", 10, strike_dip},
      {"Mann-Whitney cross-check", 30, mwu_cross_check},
      {"t distribution", 30, t_distribution},
      {"TAM lattice", 1, tam_lattice},
      {"metrics fixture", 10, metrics_fixture},
      {"protocol robustness", 60, protocol_robustness},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("threw: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && secs > c.budget_seconds) {
      o.pass = false;
      o.detail += "; over time budget";
    }
    failures += !o.pass;
    std::printf("%s  %-26s %s  [%.2f s / %.0f s]\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), secs,
                c.budget_seconds);
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
