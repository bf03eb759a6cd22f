#include <doctest.h>

#include "offac/config.hpp"
#include "offac/mdp_io.hpp"
#include "offac/records.hpp"
#include "offac/report_io.hpp"
#include "offac/schedule.hpp"
#include "offac/svg.hpp"
#include "offac/sweep.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace offac;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string records_text(const SweepResult& r) {
  std::ostringstream out;
  write_records_csv(out, r.records);
  return out.str();
}

const char* kSmallSweep = R"({
  "name": "small",
  "environment": {"name": "random_walk_19"},
  "algorithm": {"critic": "td", "lambda": [0.0, 0.9], "normalize_trace": [false, true]},
  "schedule": {"alpha0": [0.1, 0.2], "kappa": 0},
  "horizon": {"episodes": 3},
  "runs": 4,
  "seed": 11,
  "metrics": ["rms"]
})";

}  // namespace

TEST_CASE("MDP files round-trip bit exactly") {
  for (const Environment& env : {make_counterexample(), make_random_walk_19(), make_random_mdp(5), make_random_mdp(6, 7, 4, 5, 0.97)}) {
    std::ostringstream first;
    write_mdp(first, document_of(env));
    std::istringstream in(first.str());
    const MdpDocument doc = read_mdp(in);
    std::ostringstream second;
    write_mdp(second, doc);
    CHECK(first.str() == second.str());
    for (Index a = 0; a < env.mdp.num_actions(); ++a) {
      CHECK(doc.mdp.transition(a) == env.mdp.transition(a));
      CHECK(doc.mdp.reward(a) == env.mdp.reward(a));
    }
    CHECK(doc.mdp.discount() == env.mdp.discount());
    CHECK(doc.behavior.table() == env.behavior.table());
    CHECK(*doc.features == env.features.matrix());
  }
}

TEST_CASE("malformed MDP files are rejected") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_mdp(in);
  };
  CHECK_THROWS_AS(parse("offac-mdp 2\n"), ParseError);
  CHECK_THROWS_AS(parse("offac-mdp 1\nstates 1\nactions 1\ndiscount 0.5\ntransitions 1\n0 0 3 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse("offac-mdp 1\nstates 1\nactions 1\ndiscount x\n"), ParseError);
  CHECK_THROWS_AS(parse("offac-mdp 1\nstates 1\nactions 1\ndiscount 0.5\ntransitions 1\n0 0 0 0.5 0\nbehavior\n1\nend\n"),
                  ModelError);
  const auto ok = parse("# comment\noffac-mdp 1\nstates 1\nactions 1\ndiscount 0.5 # gamma\ntransitions 1\n0 0 0 1 2\nbehavior\n1\nend\n");
  CHECK(ok.mdp.reward(0, 0, 0) == 2.0);
  CHECK_FALSE(ok.features.has_value());
}

TEST_CASE("fixed-point records match the golden file") {
  const auto env = make_counterexample();
  Mat first(2, 2);
  first << 1, 0, 1, 0;
  std::ostringstream out;
  for (TraceKind kind : {TraceKind::gtd, TraceKind::emphatic})
    for (double lambda : {0.0, 0.5, 1.0})
      write_fixed_point(out, td_fixed_point(env.mdp, env.features, first, env.weights, lambda, kind));
  const std::string golden = slurp(std::string(OFFAC_TEST_DATA) + "/counterexample_fixed_points.txt");
  REQUIRE_FALSE(golden.empty());
  std::istringstream got_in(out.str()), want_in(golden);
  const auto got = read_fixed_points(got_in);
  const auto want = read_fixed_points(want_in);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].kind == want[i].kind);
    CHECK(got[i].lambda == want[i].lambda);
    CHECK((got[i].theta - want[i].theta).norm() <= 1e-9 * (1.0 + want[i].theta.norm()));
    CHECK((got[i].a - want[i].a).norm() <= 1e-9 * (1.0 + want[i].a.norm()));
    CHECK((got[i].b - want[i].b).norm() <= 1e-9 * (1.0 + want[i].b.norm()));
  }
  CHECK(want[0].theta(0) == doctest::Approx(2.0 / (3.0 - 4.0 * 0.99)).epsilon(1e-12));
}

TEST_CASE("fixed-point record round trip") {
  const auto env = make_random_mdp(3);
  const auto fp = td_fixed_point(env.mdp, env.features, env.target_table(), env.weights, 0.5, TraceKind::emphatic);
  std::ostringstream a;
  write_fixed_point(a, fp);
  std::istringstream in(a.str());
  const auto back = read_fixed_point(in);
  CHECK(back.theta == fp.theta);
  CHECK(back.a == fp.a);
  CHECK(back.b == fp.b);
  CHECK(back.condition == fp.condition);
}

TEST_CASE("schedules") {
  StepSchedule s{0.5, 100, 1.0};
  CHECK(s(0) == 0.5);
  CHECK(s(100) == doctest::Approx(0.25));
  CHECK(StepSchedule{0.3, 10, 0.0}(12345) == 0.3);
  CHECK_THROWS_AS(StepSchedule({0.1, 10, 0.4}).validate(false), ConfigError);
  CHECK_THROWS_AS(StepSchedule({0.1, 10, 0.0}).validate(false), ConfigError);
  CHECK_NOTHROW(StepSchedule({0.1, 10, 0.0}).validate(true));
  CHECK_NOTHROW(TwoTimescale({{0.1, 10, 0.6}, {0.01, 10, 1.0}, false}).validate());
  CHECK_THROWS_AS(TwoTimescale({{0.1, 10, 1.0}, {0.01, 10, 0.6}, false}).validate(), ConfigError);
  CHECK_NOTHROW(TwoTimescale({{0.1, 10, 1.0}, {0.01, 10, 0.6}, true}).validate());
}

TEST_CASE("config parsing and validation") {
  const auto c = parse_config(kSmallSweep);
  CHECK(c.algorithm.lambdas.size() == 2);
  CHECK(c.episodes == 3);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"environment": {"name": "nowhere"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schedule": {"alpha0": 0.1, "kappa": 0.3}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"algorithm": {"critic": "gtd", "actor": "emphatic_ac"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"algorithm": {"lambda": 1.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"metrics": ["speed"]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"runs": "many"})"), ConfigError);
}

TEST_CASE("records CSV round trip and summary recomputation") {
  std::vector<RunRecord> recs{{0, 5, 0, "rms", 0.5}, {0, 5, 1, "rms", 0.25}, {1, 6, 0, "rms", 0.7},
                              {1, 6, 1, "rms", 0.35}, {2, 7, 1, "rms", 1.0 / 3.0}, {3, 8, 1, "rms", 0.1}};
  std::ostringstream out;
  write_records_csv(out, recs);
  CHECK(out.str().rfind("run,seed,step,metric,value\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_records_csv(in);
  REQUIRE(back.size() == recs.size());
  CHECK(back[4].value == 1.0 / 3.0);

  const auto rows = summarize(back, 2);
  // grid 0, step 1: values 0.25 and 0.35
  bool found = false;
  for (const auto& r : rows)
    if (r.grid == 0 && r.step == 1) {
      found = true;
      CHECK(r.n == 2);
      CHECK(r.mean == doctest::Approx(0.3));
      CHECK(r.se == doctest::Approx(0.05));
    }
  CHECK(found);
}

TEST_CASE("sweep summary is recomputable from the raw records") {
  const auto cfg = parse_config(kSmallSweep);
  const auto result = run_sweep(cfg);
  std::istringstream in(records_text(result));
  const auto again = summarize(read_records_csv(in), 4);
  REQUIRE(again.size() == result.summary.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].mean == result.summary[i].mean);
    CHECK(again[i].se == result.summary[i].se);
  }
  CHECK(result.grid.size() == 8);
}

TEST_CASE("sweeps are reproducible and independent of the thread count") {
  auto cfg = parse_config(kSmallSweep);
  const std::string serial = records_text(run_sweep(cfg));
  CHECK(serial == records_text(run_sweep(cfg)));
  cfg.threads = 3;
  CHECK(serial == records_text(run_sweep(cfg)));
}

TEST_CASE("zero horizon gives an empty but valid records file") {
  auto cfg = parse_config(kSmallSweep);
  cfg.episodes = 0;
  const auto result = run_sweep(cfg);
  CHECK(result.records.empty());
  CHECK(records_text(result) == "run,seed,step,metric,value\n");
}

TEST_CASE("control sweep records J and flags divergence instead of crashing") {
  const auto cfg = parse_config(R"({
    "environment": {"name": "counterexample"},
    "algorithm": {"critic": "gtd", "actor": "offpac", "lambda": 0.0},
    "schedule": {"alpha0": [0.01, 1000.0], "kappa": 0.6, "beta0": 0.001, "beta_kappa": 1.0},
    "horizon": {"steps": 2000},
    "runs": 2,
    "metrics": ["J", "pi"],
    "record_every": 500
  })");
  const auto result = run_sweep(cfg);
  int diverged = 0, j = 0;
  for (const auto& r : result.records) {
    diverged += r.metric == "diverged";
    j += r.metric == "J";
  }
  CHECK(diverged == 2);
  CHECK(j >= 10);
}

TEST_CASE("sweep writes CSV and SVG outputs") {
  auto cfg = parse_config(kSmallSweep);
  cfg.output_dir = (std::filesystem::temp_directory_path() / "offac_sweep_test").string();
  std::filesystem::remove_all(cfg.output_dir);
  write_sweep_outputs(cfg, run_sweep(cfg));
  for (const char* f : {"records.csv", "grid.csv", "summary.csv", "best_alpha.csv", "rms_vs_alpha.svg",
                        "rms_vs_alpha_normalized.svg"})
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.output_dir) / f));
  const std::string svg = slurp(cfg.output_dir + "/rms_vs_alpha.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("lambda=0.9") != std::string::npos);
}

TEST_CASE("svg escapes labels") {
  const std::string s = line_chart_svg({{"a<b", {1, 2}, {3, 4}}}, {"t&t", "x", "y", false});
  CHECK(s.find("a&lt;b") != std::string::npos);
  CHECK(s.find("t&amp;t") != std::string::npos);
}
