// Stage orchestration: mode specs, seeds, artifacts, resume, exit codes.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bdpo/checkpoint.hpp"
#include "bdpo/errors.hpp"
#include "bdpo/pipeline.hpp"
#include "bdpo/rng.hpp"
#include "bdpo/text.hpp"
#include "doctest.h"
#include "helpers.hpp"

#ifdef BDPO_CLI_PATH
#include <sys/wait.h>
#endif

using namespace bdpo;

namespace {

const char* kTinyIni =
    "[data]\n"
    "num_conditions = 2\n"
    "pairs_per_condition = 6\n"
    "mixture_stddev = 0.4\n"
    "[diffusion]\n"
    "t_steps = 6\n"
    "hidden = 8\n"
    "time_features = 2\n"
    "[pretrain]\n"
    "steps = 30\n"
    "batch_size = 8\n"
    "[train]\n"
    "steps = 8\n"
    "batch_size = 4\n"
    "ref_update_interval = 4\n"
    "[eval]\n"
    "n_seeds = 2\n"
    "units_per_condition = 2\n"
    "[run]\n"
    "seed = 5\n";

std::filesystem::path write_tiny_config(const testkit::TempDir& dir) {
  auto path = dir / "exp.ini";
  std::ofstream out(path, std::ios::binary);
  out << kTinyIni;
  return path;
}

PipelineOptions tiny_options(const std::filesystem::path& config,
                             const std::filesystem::path& out_dir, const std::string& modes) {
  PipelineOptions opts;
  opts.config_path = config;
  opts.out_dir = out_dir;
  opts.modes = parse_mode_list(modes);
  opts.quiet = true;
  return opts;
}

std::map<std::string, std::string> snapshot_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    files[entry.path().filename().string()] = testkit::slurp(entry.path());
  return files;
}

}  // namespace

TEST_CASE("mode specs parse, name artifacts, and pick aggregation modes") {
  ModeSpec b = parse_mode_spec("balanced");
  CHECK(b.mode == LossMode::balanced);
  CHECK(b.ref_refresh);
  CHECK(b.name() == "balanced");
  CHECK(b.label_name() == "balanced");
  CHECK(b.aggregation_mode() == AggregationMode::majority);

  ModeSpec v = parse_mode_spec("vanilla@noref");
  CHECK(v.mode == LossMode::vanilla);
  CHECK(!v.ref_refresh);
  CHECK(v.name() == "vanilla_noref");
  CHECK(v.label_name() == "vanilla");
  CHECK(v.aggregation_mode() == AggregationMode::vanilla_sum);

  ModeSpec s = parse_mode_spec("single:m_target@noref");
  CHECK(s.mode == LossMode::single);
  CHECK(s.metric == "m_target");
  CHECK(!s.ref_refresh);
  CHECK(s.name() == "single_m_target_noref");
  CHECK(s.label_name() == "single_m_target");
  CHECK(s.aggregation_mode() == AggregationMode::single_metric);

  CHECK(parse_mode_spec("normalized").aggregation_mode() == AggregationMode::normalized_sum);
  CHECK(parse_mode_spec("random").aggregation_mode() == AggregationMode::random_metric);

  CHECK_THROWS_AS(parse_mode_spec("single"), ValidationError);
  CHECK_THROWS_AS(parse_mode_spec("single:"), ValidationError);
  CHECK_THROWS_AS(parse_mode_spec("bogus"), ValidationError);

  auto list = parse_mode_list("balanced, vanilla@noref ,single:m_x");
  REQUIRE(list.size() == 3);
  CHECK(list[1].name() == "vanilla_noref");
  CHECK_THROWS_AS(parse_mode_list("balanced,balanced"), ValidationError);
  CHECK_THROWS_AS(parse_mode_list(" , "), ValidationError);
  // same mode with and without refresh is two distinct variants
  CHECK(parse_mode_list("balanced,balanced@noref").size() == 2);
}

TEST_CASE("stage seeds are distinct per stage and derived from the rng") {
  std::set<std::uint64_t> seeds;
  for (const char* stage : kStageOrder) {
    std::uint64_t s = stage_seed(1, stage);
    CHECK(s == RngStream(1).split(stage).seed());
    seeds.insert(s);
  }
  CHECK(seeds.size() == 6);
  CHECK(stage_seed(1, "train") != stage_seed(2, "train"));
  CHECK(stage_seed(7, "label:balanced") != stage_seed(7, "label:vanilla"));
}

TEST_CASE("a tiny run writes every artifact and is byte-deterministic") {
  testkit::TempDir dir("pipeline");
  auto config = write_tiny_config(dir);

  run_pipeline(tiny_options(config, dir / "a", "balanced,single:m_target"));
  run_pipeline(tiny_options(config, dir / "b", "balanced,single:m_target"));

  auto a = snapshot_dir(dir / "a");
  const std::vector<std::string> expected = {
      "config.ini",
      "base.ckpt",
      "pairs.dataset",
      "labeled_balanced.dataset",
      "labeled_single_m_target.dataset",
      "model_balanced.ckpt",
      "model_single_m_target.ckpt",
      "metrics_balanced.csv",
      "metrics_single_m_target.csv",
      "winrates.csv",
      "ablation.csv",
      "report.txt",
      "winrates_balanced_vs_base.dat",
      "winrates_single_m_target_vs_base.dat",
      "winrates_balanced_vs_single_m_target.dat",
  };
  for (const std::string& name : expected)
    CHECK_MESSAGE(a.count(name) == 1, "missing artifact " << name);
  CHECK(a.size() == expected.size());

  CHECK(a == snapshot_dir(dir / "b"));

  // 3 comparisons x 4 default metrics below the header.
  std::vector<std::string_view> lines = split(a["winrates.csv"], '\n');
  std::vector<std::string> rows;
  for (std::string_view l : lines)
    if (!l.empty() && l.front() != '#') rows.emplace_back(l);
  REQUIRE(rows.size() == 1 + 3 * 4);
  CHECK(rows[0] == "comparison,metric,win_rate_percent,ties,n");
  CHECK(rows[1].starts_with("balanced_vs_base,m_target,"));
  CHECK(rows[5].starts_with("single_m_target_vs_base,"));
  CHECK(rows[9].starts_with("balanced_vs_single_m_target,"));

  std::vector<std::string_view> ab = split(a["ablation.csv"], '\n');
  std::vector<std::string> ab_rows;
  for (std::string_view l : ab)
    if (!l.empty() && l.front() != '#') ab_rows.emplace_back(l);
  REQUIRE(ab_rows.size() == 1 + 2 * 4);
  CHECK(ab_rows[0] == "model,ref_refresh,multi_metric,metric,win_rate_percent");
  CHECK(ab_rows[1].starts_with("balanced,1,1,m_target,"));
  CHECK(ab_rows[5].starts_with("single_m_target,1,0,"));

  // 8 training steps recorded, stamped with the config hash and mode.
  std::vector<std::string_view> metric_lines = split(a["metrics_balanced.csv"], '\n');
  CHECK(metric_lines[0].starts_with("# config="));
  CHECK(metric_lines[1] == "# mode=balanced");
  int data_rows = 0;
  for (std::string_view l : metric_lines)
    if (!l.empty() && l.front() != '#' && !l.starts_with("step,")) ++data_rows;
  CHECK(data_rows == 8);

  CHECK(a["report.txt"].find("balanced vs base  (n=4)") != std::string::npos);
}

TEST_CASE("noref variants share the labeled dataset of their refresh twin") {
  testkit::TempDir dir("noref");
  auto config = write_tiny_config(dir);
  run_pipeline(tiny_options(config, dir / "c", "balanced,balanced@noref"));

  auto files = snapshot_dir(dir / "c");
  CHECK(files.count("labeled_balanced.dataset") == 1);
  CHECK(files.count("labeled_balanced_noref.dataset") == 0);
  CHECK(files.count("model_balanced.ckpt") == 1);
  CHECK(files.count("model_balanced_noref.ckpt") == 1);
  CHECK(files["model_balanced.ckpt"] != files["model_balanced_noref.ckpt"]);

  std::vector<std::string_view> ab = split(files["ablation.csv"], '\n');
  bool saw_ref = false, saw_noref = false;
  for (std::string_view l : ab) {
    if (l.starts_with("balanced,1,1,")) saw_ref = true;
    if (l.starts_with("balanced_noref,0,1,")) saw_noref = true;
  }
  CHECK(saw_ref);
  CHECK(saw_noref);
}

TEST_CASE("resume skips finished artifacts; force rebuilds them") {
  testkit::TempDir dir("resume");
  auto config = write_tiny_config(dir);
  auto opts = tiny_options(config, dir / "r", "balanced");
  run_pipeline(opts);

  // Plant a sentinel: a skipped stage must not touch its artifact.
  auto model = (dir / "r") / "model_balanced.ckpt";
  {
    std::ofstream out(model, std::ios::binary | std::ios::trunc);
    out << "sentinel";
  }
  run_pipeline(opts);
  CHECK(testkit::slurp(model) == "sentinel");

  // Forcing just the train stage rebuilds the model from the same inputs.
  auto force_train = opts;
  force_train.force = true;
  force_train.stages = {"train"};
  run_pipeline(force_train);
  CHECK(testkit::slurp(model) != "sentinel");
  CHECK_NOTHROW(load_checkpoint(model));
}

TEST_CASE("stages demand their prerequisites with io errors naming the producer") {
  testkit::TempDir dir("prereq");
  auto config = write_tiny_config(dir);

  auto expect_io = [&](const std::string& stage, const std::string& producer,
                       const std::string& out_name) {
    PipelineOptions opts = tiny_options(config, dir / out_name, "balanced");
    opts.stages = {stage};
    try {
      run_pipeline(opts);
      FAIL(("expected IoError for stage " + stage));
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find(producer) != std::string::npos);
    }
  };

  expect_io("gen-pairs", "pretrain", "p1");
  expect_io("label", "gen-pairs", "p2");
  expect_io("train", "pretrain", "p3");
  expect_io("evaluate", "pretrain", "p4");
  expect_io("report", "evaluate", "p5");

  PipelineOptions bad = tiny_options(config, dir / "p6", "balanced");
  bad.stages = {"compile"};
  CHECK_THROWS_AS(run_pipeline(bad), ValidationError);

  PipelineOptions unknown_metric = tiny_options(config, dir / "p7", "single:nope");
  CHECK_THROWS_AS(run_pipeline(unknown_metric), ValidationError);
}

TEST_CASE("the seed override reroutes every stage") {
  testkit::TempDir dir("seed");
  auto config = write_tiny_config(dir);
  auto opts = tiny_options(config, dir / "s1", "balanced");
  opts.stages = {"pretrain"};
  run_pipeline(opts);
  auto other = opts;
  other.out_dir = dir / "s2";
  other.seed = 6;
  run_pipeline(other);
  CHECK(testkit::slurp((dir / "s1") / "base.ckpt") != testkit::slurp((dir / "s2") / "base.ckpt"));
  // and the snapshot records the effective seed
  CHECK(testkit::slurp((dir / "s2") / "config.ini").find("seed = 6") != std::string::npos);
}

#ifdef BDPO_CLI_PATH
TEST_CASE("cli maps error families onto exit codes") {
  testkit::TempDir dir("cli");
  auto run = [&](const std::string& args) {
    std::string cmd = std::string(BDPO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };

  CHECK(run("run --stages report --out-dir " + (dir / "fresh").string()) == 2);
  CHECK(run("gen-pairs --ckpt " + (dir / "absent.ckpt").string() + " --out " +
            (dir / "x.dataset").string()) == 2);
  CHECK(run("run --stages compile --out-dir " + (dir / "fresh2").string()) == 1);
  CHECK(run("label --in " + (dir / "nope.dataset").string() + " --out " +
            (dir / "y.dataset").string() + " --mode bogus") == 1);
  CHECK(run("sample --ckpt " + (dir / "absent.ckpt").string() + " --condition 0 --out " +
            (dir / "s.csv").string()) == 2);
}
#endif
