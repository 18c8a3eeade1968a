// Command-line front end: wires the pipeline stages and a few one-shot
// file-level operations into subcommands sharing a config file.
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bdpo/checkpoint.hpp"
#include "bdpo/config.hpp"
#include "bdpo/errors.hpp"
#include "bdpo/pipeline.hpp"
#include "bdpo/text.hpp"

namespace {

using namespace bdpo;

struct GlobalFlags {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "run";
  bool force = false;
  bool quiet = false;

  ExperimentConfig load() const {
    ExperimentConfig cfg;
    if (config.empty())
      normalize(cfg);
    else
      cfg = load_config(config);
    if (seed_set) cfg.seed = seed;
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BalancedDPO toy laboratory: majority-vote preference aggregation "
               "for diffusion model alignment"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config, "Experiment config file (INI)");
  app.add_option("--seed", g.seed, "Override the experiment seed")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--out-dir", g.out_dir, "Run directory for the run subcommand");
  app.add_flag("--force", g.force, "Recompute artifacts even if they exist");
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  int exit_code = 0;
  auto guarded = [&](auto&& body) {
    try {
      body();
    } catch (const ValidationError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      exit_code = 1;
    } catch (const IoError& e) {
      std::fprintf(stderr, "io error: %s\n", e.what());
      exit_code = 2;
    } catch (const NumericalError& e) {
      std::fprintf(stderr, "numerical error: %s\n", e.what());
      exit_code = 3;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      exit_code = 1;
    }
  };

  // pretrain
  {
    auto* cmd = app.add_subcommand("pretrain", "Train the base diffusion model");
    auto out = std::make_shared<std::string>();
    cmd->add_option("--out", *out, "Output checkpoint")->required();
    cmd->callback([&, out] {
      guarded([&] {
        ExperimentConfig cfg = g.load();
        run_pretrain(cfg, stage_seed(cfg.seed, "pretrain"), *out, g.quiet);
      });
    });
  }
  // gen-pairs
  {
    auto* cmd = app.add_subcommand("gen-pairs", "Sample and score candidate pairs");
    auto ckpt = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--ckpt", *ckpt, "Base model checkpoint")->required();
    cmd->add_option("--out", *out, "Output dataset")->required();
    cmd->callback([&, ckpt, out] {
      guarded([&] {
        ExperimentConfig cfg = g.load();
        run_gen_pairs(cfg, *ckpt, stage_seed(cfg.seed, "gen-pairs"), *out, g.quiet);
      });
    });
  }
  // label
  {
    auto* cmd = app.add_subcommand("label", "Vote and aggregate preference labels");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>();
    auto metric = std::make_shared<std::string>();
    auto tie = std::make_shared<std::string>();
    auto weights = std::make_shared<std::vector<double>>();
    cmd->add_option("--in", *in, "Scored dataset")->required();
    cmd->add_option("--out", *out, "Labeled dataset")->required();
    cmd->add_option("--mode", *mode, "balanced|vanilla|normalized|random|single:<metric>")
        ->required();
    cmd->add_option("--weights", *weights, "Aggregation weights");
    cmd->add_option("--metric", *metric, "Metric id for single mode");
    cmd->add_option("--tie-policy", *tie, "first_metric|skip_pair|fixed_plus");
    cmd->callback([&, in, out, mode, metric, tie, weights] {
      guarded([&] {
        ExperimentConfig cfg = g.load();
        if (!weights->empty()) cfg.weights = *weights;
        if (!tie->empty()) cfg.tie_policy = tie_policy_from_string(*tie);
        ModeSpec spec = !metric->empty() && *mode == "single"
                            ? parse_mode_spec("single:" + *metric)
                            : parse_mode_spec(*mode);
        run_label(cfg, spec, *in, *out, stage_seed(cfg.seed, "label:" + spec.label_name()),
                  g.quiet);
      });
    });
  }
  // train
  {
    auto* cmd = app.add_subcommand("train", "Preference-optimize from a labeled dataset");
    auto data = std::make_shared<std::string>();
    auto init = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto metrics = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("balanced");
    cmd->add_option("--data", *data, "Labeled dataset")->required();
    cmd->add_option("--init", *init, "Initial (base) checkpoint")->required();
    cmd->add_option("--out", *out, "Output checkpoint")->required();
    cmd->add_option("--metrics", *metrics, "Per-step metrics CSV")->required();
    cmd->add_option("--mode", *mode, "Loss/label mode spec (default balanced)");
    cmd->callback([&, data, init, out, metrics, mode] {
      guarded([&] {
        ExperimentConfig cfg = g.load();
        ModeSpec spec = parse_mode_spec(*mode);
        run_train(cfg, spec, *data, *init, *out, *metrics,
                  stage_seed(cfg.seed, "train:" + spec.name()), g.quiet);
      });
    });
  }
  // sample
  {
    auto* cmd = app.add_subcommand("sample", "Draw samples from a checkpoint");
    auto ckpt = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto condition = std::make_shared<int>(0);
    auto n = std::make_shared<int>(1);
    cmd->add_option("--ckpt", *ckpt, "Model checkpoint")->required();
    cmd->add_option("--condition", *condition, "Condition id")->required();
    cmd->add_option("--n", *n, "Number of samples");
    cmd->add_option("--out", *out, "Output CSV")->required();
    cmd->callback([&, ckpt, out, condition, n] {
      guarded([&] {
        Checkpoint ck = load_checkpoint(*ckpt);
        NoiseSchedule schedule = ck.schedule.build();
        std::uint64_t seed = g.seed_set ? g.seed : 0;
        RngStream root = RngStream(seed).split("sample");
        std::ofstream file(*out, std::ios::binary | std::ios::trunc);
        if (!file) throw IoError("cannot open " + *out + " for writing");
        file << "# seed=" << seed << " condition=" << *condition << "\nindex";
        for (int i = 0; i < ck.params.cfg.d; ++i) file << ",x" << i;
        file << '\n';
        for (int i = 0; i < *n; ++i) {
          RngStream sub = root.split(static_cast<std::uint64_t>(i));
          Sample s = sample(ck.params, schedule, {*condition}, sub);
          file << i;
          for (double v : s.x) file << ',' << format_double(v);
          file << '\n';
        }
        file.flush();
        if (!file) throw IoError("write to " + *out + " failed");
        if (!g.quiet) std::printf("[sample] wrote %s (%d samples)\n", out->c_str(), *n);
      });
    });
  }
  // evaluate
  {
    auto* cmd = app.add_subcommand("evaluate", "Best-of-N win rates between two checkpoints");
    auto a_path = std::make_shared<std::string>();
    auto b_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--ckpt-a", *a_path, "First checkpoint")->required();
    cmd->add_option("--ckpt-b", *b_path, "Second checkpoint")->required();
    cmd->add_option("--out", *out, "Output CSV")->required();
    cmd->callback([&, a_path, b_path, out] {
      guarded([&] {
        ExperimentConfig cfg = g.load();
        Checkpoint a = load_checkpoint(*a_path);
        Checkpoint b = load_checkpoint(*b_path);
        EvalConfig ec = cfg.eval_config();
        std::uint64_t seed = stage_seed(cfg.seed, "evaluate");
        BestScores sa = best_scores(a.params, a.schedule.build(), ec, seed);
        BestScores sb = best_scores(b.params, b.schedule.build(), ec, seed);
        WinRateReport rep = win_rate(sa, sb, cfg.tie_value,
                                     std::filesystem::path(*a_path).stem().string(),
                                     std::filesystem::path(*b_path).stem().string());
        std::vector<WinRateReport> reports{rep};
        std::vector<std::string> comments{"config=" + config_hash(cfg) +
                                          " seed=" + std::to_string(cfg.seed)};
        write_report(reports, *out, comments);
        if (!g.quiet) std::printf("%s", render_report(reports).c_str());
      });
    });
  }
  // report
  {
    auto* cmd = app.add_subcommand("report", "Render win-rate tables as text");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "winrates.csv from evaluate")->required();
    cmd->add_option("--out", *out, "Output text file")->required();
    cmd->callback([&, in, out] { guarded([&] { run_report(*in, *out, g.quiet); }); });
  }
  // run
  {
    auto* cmd = app.add_subcommand("run", "Run pipeline stages end to end");
    auto stages = std::make_shared<std::string>();
    auto modes = std::make_shared<std::string>();
    cmd->add_option("--stages", *stages, "Comma-separated stage list (default: all)");
    cmd->add_option("--mode", *modes, "Comma-separated mode specs (default: balanced)");
    cmd->callback([&, stages, modes] {
      guarded([&] {
        PipelineOptions opts;
        opts.config_path = g.config;
        opts.out_dir = g.out_dir;
        if (g.seed_set) opts.seed = g.seed;
        opts.force = g.force;
        opts.quiet = g.quiet;
        for (std::string_view s : split(*stages, ','))
          if (!trim(s).empty()) opts.stages.emplace_back(trim(s));
        if (!modes->empty()) opts.modes = parse_mode_list(*modes);
        run_pipeline(opts);
      });
    });
  }

  // Accept the shared flags on either side of the subcommand name.
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // CLI misuse counts as a validation failure
  }
  return exit_code;
}
