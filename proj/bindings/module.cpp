// Python surface: the labeling primitives, schedule/reward/denoiser
// building blocks, checkpoint sampling, and the end-to-end pipeline.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>

#include "bdpo/aggregate.hpp"
#include "bdpo/checkpoint.hpp"
#include "bdpo/config.hpp"
#include "bdpo/counters.hpp"
#include "bdpo/denoiser.hpp"
#include "bdpo/diffusion.hpp"
#include "bdpo/dpo.hpp"
#include "bdpo/errors.hpp"
#include "bdpo/pipeline.hpp"
#include "bdpo/rewards.hpp"
#include "bdpo/rng.hpp"
#include "bdpo/schedule.hpp"

namespace py = pybind11;
using namespace bdpo;

namespace {

std::optional<std::pair<int, bool>> consensus_of(const std::vector<int>& votes,
                                                 const std::string& tie_policy) {
  auto label = majority_consensus(VoteVector{votes}, tie_policy_from_string(tie_policy));
  if (!label) return std::nullopt;
  return std::make_pair(label->s, label->tie_broken);
}

std::vector<std::vector<double>> sample_checkpoint(const std::string& path, int condition, int n,
                                                   std::uint64_t seed) {
  Checkpoint ck = load_checkpoint(path);
  NoiseSchedule schedule = ck.schedule.build();
  RngStream root = RngStream(seed).split("sample");
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RngStream sub = root.split(static_cast<std::uint64_t>(i));
    out.push_back(sample(ck.params, schedule, {condition}, sub).x);
  }
  return out;
}

py::dict checkpoint_info(const std::string& path) {
  Checkpoint ck = load_checkpoint(path);
  py::dict info;
  info["d"] = ck.params.cfg.d;
  info["time_features"] = ck.params.cfg.m;
  info["num_conditions"] = ck.params.cfg.c;
  info["hidden"] = ck.params.cfg.h;
  info["t_steps"] = ck.schedule.t_steps;
  info["beta_min"] = ck.schedule.beta_min;
  info["beta_max"] = ck.schedule.beta_max;
  info["param_count"] = ck.params.cfg.param_count();
  return info;
}

void run_pipeline_py(const std::string& config, const std::string& out_dir,
                     const std::vector<std::string>& stages, const std::string& modes,
                     std::optional<std::uint64_t> seed, bool force, bool quiet) {
  PipelineOptions opts;
  opts.config_path = config;
  opts.out_dir = out_dir;
  opts.stages = stages;
  if (!modes.empty()) opts.modes = parse_mode_list(modes);
  opts.seed = seed;
  opts.force = force;
  opts.quiet = quiet;
  run_pipeline(opts);
}

py::dict counters_py() {
  py::dict d;
  d["reward_evaluations"] = counters::reward_evaluations.load();
  d["vote_comparisons"] = counters::vote_comparisons.load();
  d["loss_grad_evaluations"] = counters::loss_grad_evaluations.load();
  d["sampler_calls"] = counters::sampler_calls.load();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-metric preference aggregation for toy diffusion alignment";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("split", [](const RngStream& s, const std::string& label) { return s.split(label); },
           py::arg("label"))
      .def("split_index",
           [](const RngStream& s, std::uint64_t idx) { return s.split(idx); }, py::arg("index"))
      .def("uniform", &RngStream::uniform)
      .def("normal", &RngStream::normal)
      .def("uniform_int", &RngStream::uniform_int, py::arg("bound"))
      .def("seed", &RngStream::seed);

  m.def("vote", &vote_metric, py::arg("reward_a"), py::arg("reward_b"), py::arg("margin") = 0.0,
        py::arg("paper_faithful") = false,
        "Per-metric preference vote: +1, -1, or 0 (abstain within the margin)");
  m.def("consensus", &consensus_of, py::arg("votes"), py::arg("tie_policy") = "first_metric",
        "Majority label (s, tie_broken) or None when the pair is skipped");
  m.def("bt_probability", &bt_probability, py::arg("reward_winner"), py::arg("reward_loser"));

  py::class_<NoiseSchedule>(m, "Schedule")
      .def(py::init([](int t_steps, double beta_min, double beta_max) {
             return ScheduleRecipe{t_steps, beta_min, beta_max}.build();
           }),
           py::arg("t_steps") = 50, py::arg("beta_min") = 0.005, py::arg("beta_max") = 0.18)
      .def_readonly("t_steps", &NoiseSchedule::t_steps)
      .def_readonly("alpha_bar", &NoiseSchedule::alpha_bar)
      .def("alpha", &NoiseSchedule::alpha, py::arg("t"))
      .def("sigma", &NoiseSchedule::sigma, py::arg("t"))
      .def("snr", &NoiseSchedule::snr, py::arg("t"));

  py::class_<RewardRegistry>(m, "RewardRegistry")
      .def_static("default", &default_registry, py::arg("num_conditions") = 4, py::arg("d") = 2)
      .def_property_readonly("metric_ids", [](const RewardRegistry& r) { return r.metric_ids(); })
      .def("score_all",
           [](const RewardRegistry& r, const std::vector<double>& x, int condition) {
             return score_all(r, {condition}, {x}).values;
           },
           py::arg("x"), py::arg("condition"));

  py::class_<DenoiserParams>(m, "Denoiser")
      .def_static(
          "random_init",
          [](int d, int m_feat, int c, int h, std::uint64_t seed) {
            RngStream rng(seed);
            return DenoiserParams::random_init({d, m_feat, c, h}, rng);
          },
          py::arg("d") = 2, py::arg("time_features") = 4, py::arg("num_conditions") = 4,
          py::arg("hidden") = 64, py::arg("seed") = 0)
      .def_property_readonly("param_count",
                             [](const DenoiserParams& p) { return p.cfg.param_count(); })
      .def("predict",
           [](const DenoiserParams& p, const std::vector<double>& x, int t, int condition) {
             return denoise(p, x, t, {condition});
           },
           py::arg("x"), py::arg("t"), py::arg("condition"));

  m.def("sample_checkpoint", &sample_checkpoint, py::arg("path"), py::arg("condition"),
        py::arg("n") = 1, py::arg("seed") = 0,
        "Ancestral samples from a stored checkpoint, one list per draw");
  m.def("checkpoint_info", &checkpoint_info, py::arg("path"));

  m.def("run_pipeline", &run_pipeline_py, py::arg("config") = std::string(),
        py::arg("out_dir") = "run", py::arg("stages") = std::vector<std::string>{},
        py::arg("modes") = std::string(), py::arg("seed") = std::nullopt,
        py::arg("force") = false, py::arg("quiet") = true,
        "Execute pipeline stages against a run directory (empty stages = all)");

  m.def("counters", &counters_py, "Instrumentation counters since the last reset");
  m.def("reset_counters", &counters::reset);
}
