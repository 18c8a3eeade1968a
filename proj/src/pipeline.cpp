#include "bdpo/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "bdpo/checkpoint.hpp"
#include "bdpo/dataset.hpp"
#include "bdpo/errors.hpp"
#include "bdpo/text.hpp"

namespace bdpo {

std::string ModeSpec::name() const {
  std::string n{to_string(mode)};
  if (mode == LossMode::single) n += "_" + metric;
  if (!ref_refresh) n += "_noref";
  return n;
}

std::string ModeSpec::label_name() const {
  std::string n{to_string(mode)};
  if (mode == LossMode::single) n += "_" + metric;
  return n;
}

AggregationMode ModeSpec::aggregation_mode() const {
  switch (mode) {
    case LossMode::balanced: return AggregationMode::majority;
    case LossMode::vanilla: return AggregationMode::vanilla_sum;
    case LossMode::normalized: return AggregationMode::normalized_sum;
    case LossMode::random: return AggregationMode::random_metric;
    case LossMode::single: return AggregationMode::single_metric;
  }
  throw ValidationError("unknown loss mode value");
}

ModeSpec parse_mode_spec(std::string_view spec) {
  ModeSpec out;
  std::string_view body = spec;
  if (body.ends_with("@noref")) {
    out.ref_refresh = false;
    body.remove_suffix(6);
  }
  if (body.starts_with("single:")) {
    out.mode = LossMode::single;
    out.metric = std::string(body.substr(7));
    if (out.metric.empty())
      throw ValidationError("mode 'single:' needs a metric id, e.g. single:m_target");
    return out;
  }
  out.mode = loss_mode_from_string(body);
  if (out.mode == LossMode::single)
    throw ValidationError("mode 'single' needs a metric id, e.g. single:m_target");
  return out;
}

std::vector<ModeSpec> parse_mode_list(std::string_view csv) {
  std::vector<ModeSpec> out;
  for (std::string_view tok : split(csv, ','))
    if (!trim(tok).empty()) out.push_back(parse_mode_spec(trim(tok)));
  if (out.empty()) throw ValidationError("empty mode list");
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i].name() == out[j].name())
        throw ValidationError("duplicate mode '" + out[i].name() + "'");
  return out;
}

std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) {
  return RngStream(seed).split(stage).seed();
}

namespace {

void say(bool quiet, const std::string& msg) {
  if (!quiet) std::printf("%s\n", msg.c_str());
}

std::vector<std::string> stamp(const ExperimentConfig& cfg) {
  return {"config=" + config_hash(cfg) + " seed=" + std::to_string(cfg.seed)};
}

void need_artifact(const std::filesystem::path& p, const std::string& producing_stage) {
  if (!std::filesystem::exists(p))
    throw IoError("missing " + p.string() + "; run the " + producing_stage + " stage first");
}

}  // namespace

void run_pretrain(const ExperimentConfig& cfg, std::uint64_t seed,
                  const std::filesystem::path& out_ckpt, bool quiet) {
  PretrainConfig pc = cfg.pretrain_config(seed);
  PretrainResult res = pretrain(pc);
  save_checkpoint({res.params, cfg.schedule()}, out_ckpt, stamp(cfg));
  std::string note = "[pretrain] wrote " + out_ckpt.string() + " (" +
                     std::to_string(pc.steps) + " steps";
  if (!res.loss_per_step.empty())
    note += ", final loss " + format_double(res.loss_per_step.back());
  say(quiet, note + ")");
}

void run_gen_pairs(const ExperimentConfig& cfg, const std::filesystem::path& base_ckpt,
                   std::uint64_t seed, const std::filesystem::path& out_dataset, bool quiet) {
  Checkpoint base = load_checkpoint(base_ckpt);
  NoiseSchedule schedule = base.schedule.build();
  RewardRegistry registry = cfg.build_registry();
  RngStream root = RngStream(seed).split("gen-pairs");

  std::vector<PreferencePair> pairs;
  pairs.reserve(static_cast<std::size_t>(cfg.num_conditions) * cfg.pairs_per_condition);
  for (int c = 0; c < cfg.num_conditions; ++c) {
    for (int i = 0; i < cfg.pairs_per_condition; ++i) {
      PreferencePair p;
      p.pair_id = static_cast<std::int64_t>(c) * cfg.pairs_per_condition + i;
      p.condition = {c};
      RngStream sub = root.split(static_cast<std::uint64_t>(p.pair_id));
      p.sample_a = sample(base.params, schedule, p.condition, sub);
      p.sample_b = sample(base.params, schedule, p.condition, sub);
      p.scores_a = score_all(registry, p.condition, p.sample_a);
      p.scores_b = score_all(registry, p.condition, p.sample_b);
      pairs.push_back(std::move(p));
    }
  }
  write_dataset(pairs, out_dataset, stamp(cfg));
  say(quiet, "[gen-pairs] wrote " + out_dataset.string() + " (" +
                 std::to_string(pairs.size()) + " pairs)");
}

void run_label(const ExperimentConfig& cfg, const ModeSpec& spec,
               const std::filesystem::path& in_dataset,
               const std::filesystem::path& out_dataset, std::uint64_t seed, bool quiet) {
  std::vector<PreferencePair> pairs = read_dataset(in_dataset);
  AggregationPolicy policy = cfg.aggregation(spec.aggregation_mode(), spec.metric);
  std::optional<NormalizationStats> stats;
  if (policy.mode == AggregationMode::normalized_sum)
    stats = compute_normalization(pairs);
  std::vector<PreferencePair> labeled =
      label_dataset(pairs, policy, stats ? &*stats : nullptr, seed);
  if (labeled.empty())
    throw ValidationError("labeling '" + spec.label_name() + "' skipped every pair");
  auto comments = stamp(cfg);
  comments.push_back("labeling=" + std::string(to_string(policy.mode)));
  write_dataset(labeled, out_dataset, comments);
  std::string note = "[label] wrote " + out_dataset.string() + " (" +
                     std::to_string(labeled.size()) + " labeled";
  if (labeled.size() != pairs.size())
    note += ", " + std::to_string(pairs.size() - labeled.size()) + " skipped";
  say(quiet, note + ")");
}

void run_train(const ExperimentConfig& cfg, const ModeSpec& spec,
               const std::filesystem::path& data_path, const std::filesystem::path& init_ckpt,
               const std::filesystem::path& out_ckpt, const std::filesystem::path& metrics_csv,
               std::uint64_t seed, bool quiet) {
  std::vector<PreferencePair> labeled = read_dataset(data_path);
  Checkpoint init = load_checkpoint(init_ckpt);
  NoiseSchedule schedule = init.schedule.build();
  TrainConfig tc = cfg.train_config(spec.mode, spec.ref_refresh, seed);
  auto [params, record] = train(labeled, init.params, schedule, tc);

  auto comments = stamp(cfg);
  comments.push_back("mode=" + spec.name());
  save_checkpoint({std::move(params), init.schedule}, out_ckpt, comments);
  write_metrics_csv(record, metrics_csv, comments);
  std::string note = "[train] " + spec.name() + ": wrote " + out_ckpt.string();
  if (!record.steps.empty())
    note += " (final loss " + format_double(record.steps.back().loss) + ", " +
            std::to_string(record.ref_refresh_count) + " ref refreshes";
  say(quiet, note + ")");
}

namespace {

struct RunPaths {
  std::filesystem::path dir;
  std::filesystem::path config() const { return dir / "config.ini"; }
  std::filesystem::path base() const { return dir / "base.ckpt"; }
  std::filesystem::path pairs() const { return dir / "pairs.dataset"; }
  std::filesystem::path labeled(const ModeSpec& m) const {
    return dir / ("labeled_" + m.label_name() + ".dataset");
  }
  std::filesystem::path model(const ModeSpec& m) const {
    return dir / ("model_" + m.name() + ".ckpt");
  }
  std::filesystem::path metrics(const ModeSpec& m) const {
    return dir / ("metrics_" + m.name() + ".csv");
  }
  std::filesystem::path winrates() const { return dir / "winrates.csv"; }
  std::filesystem::path ablation() const { return dir / "ablation.csv"; }
  std::filesystem::path report() const { return dir / "report.txt"; }
};

void evaluate_stage(const ExperimentConfig& cfg, const RunPaths& paths,
                    const std::vector<ModeSpec>& modes, bool quiet) {
  need_artifact(paths.base(), "pretrain");
  for (const ModeSpec& m : modes) need_artifact(paths.model(m), "train");

  EvalConfig ec = cfg.eval_config();
  std::uint64_t seed = stage_seed(cfg.seed, "evaluate");

  std::vector<std::string> names{"base"};
  std::vector<BestScores> scores;
  {
    Checkpoint base = load_checkpoint(paths.base());
    scores.push_back(best_scores(base.params, base.schedule.build(), ec, seed));
  }
  for (const ModeSpec& m : modes) {
    Checkpoint ck = load_checkpoint(paths.model(m));
    scores.push_back(best_scores(ck.params, ck.schedule.build(), ec, seed));
    names.push_back(m.name());
  }

  // Each trained model against base first, then the model-vs-model grid.
  std::vector<WinRateReport> reports;
  for (std::size_t i = 1; i < scores.size(); ++i)
    reports.push_back(win_rate(scores[i], scores[0], cfg.tie_value, names[i], names[0]));
  for (std::size_t i = 1; i < scores.size(); ++i)
    for (std::size_t j = i + 1; j < scores.size(); ++j)
      reports.push_back(win_rate(scores[i], scores[j], cfg.tie_value, names[i], names[j]));
  write_report(reports, paths.winrates(), stamp(cfg));

  std::vector<AblationRow> rows;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const WinRateReport& vs_base = reports[i];
    bool multi = modes[i].mode == LossMode::balanced || modes[i].mode == LossMode::vanilla ||
                 modes[i].mode == LossMode::normalized;
    for (std::size_t k = 0; k < vs_base.metric_ids.size(); ++k)
      rows.push_back({modes[i].name(), modes[i].ref_refresh, multi, vs_base.metric_ids[k],
                      vs_base.win_rate[k]});
  }
  write_ablation_table(rows, paths.ablation(), stamp(cfg));
  say(quiet, "[evaluate] wrote " + paths.winrates().string() + " (" +
                 std::to_string(reports.size()) + " comparisons) and " +
                 paths.ablation().string());
}

}  // namespace

void run_report(const std::filesystem::path& winrates_csv, const std::filesystem::path& out_txt,
                bool quiet) {
  need_artifact(winrates_csv, "evaluate");
  std::ifstream in(winrates_csv, std::ios::binary);
  if (!in) throw IoError("cannot open " + winrates_csv.string() + " for reading");

  std::map<std::string, WinRateReport> by_comparison;
  std::vector<std::string> order;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (!saw_header) {  // column header row
      saw_header = true;
      continue;
    }
    auto f = split(sv, ',');
    if (f.size() != 5)
      throw ValidationError(winrates_csv.string() + ":" + std::to_string(line_no) +
                            ": expected 5 columns");
    std::string comparison(f[0]);
    auto [it, fresh] = by_comparison.try_emplace(comparison);
    if (fresh) {
      order.push_back(comparison);
      auto sep = comparison.find("_vs_");
      if (sep == std::string::npos)
        throw ValidationError(winrates_csv.string() + ":" + std::to_string(line_no) +
                              ": comparison '" + comparison + "' lacks '_vs_'");
      it->second.model_a = comparison.substr(0, sep);
      it->second.model_b = comparison.substr(sep + 4);
    }
    it->second.metric_ids.emplace_back(f[1]);
    it->second.win_rate.push_back(parse_double(f[2]) / 100.0);
    it->second.ties.push_back(static_cast<int>(parse_int(f[3])));
    it->second.n_units = static_cast<int>(parse_int(f[4]));
  }
  if (order.empty())
    throw ValidationError(winrates_csv.string() + ": no comparison rows");

  std::vector<WinRateReport> reports;
  for (const std::string& c : order) reports.push_back(by_comparison[c]);
  std::ofstream out(out_txt, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + out_txt.string() + " for writing");
  out << render_report(reports);
  out.flush();
  if (!out) throw IoError("write to " + out_txt.string() + " failed");
  say(quiet, "[report] wrote " + out_txt.string());
}

void run_pipeline(const PipelineOptions& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = load_config(opts.config_path);
  } else {
    normalize(cfg);
  }
  if (opts.seed) cfg.seed = *opts.seed;

  std::vector<ModeSpec> modes = opts.modes;
  if (modes.empty()) modes.push_back(ModeSpec{});
  for (const ModeSpec& m : modes)
    if (m.mode == LossMode::single) cfg.build_registry().index_of(m.metric);

  std::vector<std::string> stages = opts.stages;
  for (const std::string& s : stages) {
    if (std::find(std::begin(kStageOrder), std::end(kStageOrder), s) == std::end(kStageOrder))
      throw ValidationError("unknown stage '" + s + "'");
  }
  auto wants = [&](std::string_view stage) {
    return stages.empty() ||
           std::find(stages.begin(), stages.end(), stage) != stages.end();
  };

  RunPaths paths{opts.out_dir};
  std::filesystem::create_directories(paths.dir);
  {
    std::ofstream snap(paths.config(), std::ios::binary | std::ios::trunc);
    if (!snap) throw IoError("cannot open " + paths.config().string() + " for writing");
    snap << render_config(cfg);
  }

  auto fresh = [&](const std::filesystem::path& p) {
    return opts.force || !std::filesystem::exists(p);
  };

  if (wants("pretrain")) {
    if (fresh(paths.base()))
      run_pretrain(cfg, stage_seed(cfg.seed, "pretrain"), paths.base(), opts.quiet);
    else
      say(opts.quiet, "[pretrain] " + paths.base().string() + " exists, skipping");
  }

  if (wants("gen-pairs")) {
    need_artifact(paths.base(), "pretrain");
    if (fresh(paths.pairs()))
      run_gen_pairs(cfg, paths.base(), stage_seed(cfg.seed, "gen-pairs"), paths.pairs(),
                    opts.quiet);
    else
      say(opts.quiet, "[gen-pairs] " + paths.pairs().string() + " exists, skipping");
  }

  if (wants("label")) {
    need_artifact(paths.pairs(), "gen-pairs");
    for (const ModeSpec& m : modes) {
      if (!fresh(paths.labeled(m))) {
        say(opts.quiet, "[label] " + paths.labeled(m).string() + " exists, skipping");
        continue;
      }
      run_label(cfg, m, paths.pairs(), paths.labeled(m),
                stage_seed(cfg.seed, "label:" + m.label_name()), opts.quiet);
    }
  }

  if (wants("train")) {
    need_artifact(paths.base(), "pretrain");
    for (const ModeSpec& m : modes) {
      need_artifact(paths.labeled(m), "label");
      if (!fresh(paths.model(m))) {
        say(opts.quiet, "[train] " + paths.model(m).string() + " exists, skipping");
        continue;
      }
      run_train(cfg, m, paths.labeled(m), paths.base(), paths.model(m), paths.metrics(m),
                stage_seed(cfg.seed, "train:" + m.name()), opts.quiet);
    }
  }

  if (wants("evaluate")) {
    if (fresh(paths.winrates()) || fresh(paths.ablation()))
      evaluate_stage(cfg, paths, modes, opts.quiet);
    else
      say(opts.quiet, "[evaluate] " + paths.winrates().string() + " exists, skipping");
  }

  if (wants("report")) {
    if (fresh(paths.report()))
      run_report(paths.winrates(), paths.report(), opts.quiet);
    else
      say(opts.quiet, "[report] " + paths.report().string() + " exists, skipping");
  }
}

}  // namespace bdpo
