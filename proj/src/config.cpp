#include "bdpo/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "bdpo/errors.hpp"
#include "bdpo/text.hpp"

namespace bdpo {

RewardRegistry ExperimentConfig::build_registry() const {
  RewardRegistry reg;
  for (const MetricDecl& m : metrics) {
    RewardSpec spec;
    spec.metric_id = m.metric_id;
    spec.kind = m.kind;
    spec.scale = m.scale;
    if (m.kind == RewardKind::target_proximity)
      spec.targets = circle_means(num_conditions, d, m.radius.value_or(mixture_radius));
    if (m.kind == RewardKind::ring_fit) spec.rho = m.rho.value_or(1.0);
    reg.specs.push_back(std::move(spec));
  }
  validate_registry(reg, num_conditions, d);
  return reg;
}

MixtureConfig ExperimentConfig::mixture() const {
  return {d, num_conditions, mixture_radius, mixture_stddev};
}

DenoiserConfig ExperimentConfig::model() const { return {d, time_features, num_conditions, hidden}; }

ScheduleRecipe ExperimentConfig::schedule() const { return {t_steps, beta_min, beta_max}; }

PretrainConfig ExperimentConfig::pretrain_config(std::uint64_t stage_seed) const {
  PretrainConfig p;
  p.model = model();
  p.schedule = schedule();
  p.mixture = mixture();
  p.steps = pretrain_steps;
  p.batch_size = pretrain_batch_size;
  p.learning_rate = pretrain_learning_rate;
  p.optim.kind = pretrain_optimizer;
  p.omega = omega;
  p.seed = stage_seed;
  return p;
}

AggregationPolicy ExperimentConfig::aggregation(AggregationMode mode,
                                                std::string chosen_metric) const {
  AggregationPolicy policy;
  policy.mode = mode;
  policy.weights = weights;
  policy.chosen_metric = std::move(chosen_metric);
  policy.tie_policy = tie_policy;
  if (margin > 0)
    policy.margins.assign(metrics.size(), margin);
  policy.paper_faithful_votes = paper_faithful_votes;
  return policy;
}

TrainConfig ExperimentConfig::train_config(LossMode mode, bool ref_refresh,
                                           std::uint64_t stage_seed) const {
  TrainConfig t;
  t.steps = train_steps;
  t.batch_size = train_batch_size;
  t.learning_rate = train_learning_rate;
  t.warmup_steps = warmup_steps;
  t.beta = dpo_beta;
  if (ref_refresh && ref_update_interval > 0)
    t.ref_update_interval = ref_update_interval;
  else
    t.ref_update_interval = std::nullopt;
  t.mode = mode;
  t.weights = weights;
  t.optim.kind = train_optimizer;
  t.optim.weight_decay = weight_decay;
  t.seed = stage_seed;
  return t;
}

EvalConfig ExperimentConfig::eval_config() const {
  EvalConfig e;
  e.n_seeds = eval_n_seeds;
  for (int r = 0; r < units_per_condition; ++r)
    for (int c = 0; c < num_conditions; ++c) e.units.push_back({c});
  e.registry = build_registry();
  e.tie_value = tie_value;
  return e;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError(path + ": " + msg);
}

double num(const std::string& path, std::string_view v) {
  try {
    return parse_double(v);
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

std::int64_t integer(const std::string& path, std::string_view v) {
  try {
    return parse_int(v);
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

bool boolean(const std::string& path, std::string_view v) {
  if (v == "0" || v == "false") return false;
  if (v == "1" || v == "true") return true;
  fail(path, "expected 0/1/true/false, got '" + std::string(v) + "'");
}

ExperimentConfig::MetricDecl parse_metric_decl(std::string_view value) {
  auto tokens = split(value, ' ');
  std::erase_if(tokens, [](std::string_view t) { return t.empty(); });
  if (tokens.size() < 3)
    fail("rewards.metric", "expected '<id> <kind> <scale> [rho=..] [radius=..]', got '" +
                               std::string(value) + "'");
  ExperimentConfig::MetricDecl decl;
  decl.metric_id = std::string(tokens[0]);
  decl.kind = reward_kind_from_string(tokens[1]);
  decl.scale = num("rewards.metric " + decl.metric_id + ".scale", tokens[2]);
  for (std::size_t i = 3; i < tokens.size(); ++i) {
    std::string path = "rewards.metric " + decl.metric_id;
    if (tokens[i].starts_with("rho="))
      decl.rho = num(path + ".rho", tokens[i].substr(4));
    else if (tokens[i].starts_with("radius="))
      decl.radius = num(path + ".radius", tokens[i].substr(7));
    else
      fail(path, "unknown parameter '" + std::string(tokens[i]) + "'");
  }
  return decl;
}

std::vector<double> parse_weights(const std::string& path, std::string_view value) {
  std::vector<double> out;
  for (std::string_view tok : split(value, ' '))
    if (!tok.empty()) out.push_back(num(path, tok));
  return out;
}

}  // namespace

void normalize(ExperimentConfig& cfg) {
  if (cfg.metrics.empty()) {
    cfg.metrics.push_back({"m_target", RewardKind::target_proximity, 1.0, {}, {}});
    cfg.metrics.push_back({"m_compact", RewardKind::compactness, 100.0, {}, {}});
    cfg.metrics.push_back({"m_axis", RewardKind::axis_preference, 0.01, {}, {}});
    cfg.metrics.push_back({"m_ring", RewardKind::ring_fit, 1000.0, 1.0, {}});
  }
  for (auto& m : cfg.metrics) {
    if (m.kind == RewardKind::target_proximity && !m.radius) m.radius = cfg.mixture_radius;
    if (m.kind == RewardKind::ring_fit && !m.rho) m.rho = 1.0;
  }

  if (cfg.d < 1) fail("data.d", "must be >= 1");
  if (cfg.num_conditions < 1) fail("data.num_conditions", "must be >= 1");
  if (!(cfg.mixture_radius >= 0)) fail("data.mixture_radius", "must be >= 0");
  if (!(cfg.mixture_stddev > 0)) fail("data.mixture_stddev", "must be > 0");
  if (cfg.pairs_per_condition < 1) fail("data.pairs_per_condition", "must be >= 1");
  if (cfg.t_steps < 1) fail("diffusion.t_steps", "must be >= 1");
  if (!(cfg.beta_min > 0) || !(cfg.beta_max < 1) || cfg.beta_min > cfg.beta_max)
    fail("diffusion.beta_min/beta_max", "need 0 < beta_min <= beta_max < 1");
  if (cfg.hidden < 1) fail("diffusion.hidden", "must be >= 1");
  if (cfg.time_features < 1) fail("diffusion.time_features", "must be >= 1");
  if (cfg.pretrain_steps < 0) fail("pretrain.steps", "must be >= 0");
  if (cfg.pretrain_batch_size < 1) fail("pretrain.batch_size", "must be >= 1");
  if (!(cfg.pretrain_learning_rate > 0)) fail("pretrain.learning_rate", "must be > 0");
  if (!(cfg.margin >= 0)) fail("aggregation.margin", "must be >= 0");
  if (!cfg.weights.empty() && cfg.weights.size() != cfg.metrics.size())
    fail("aggregation.weights", "count " + std::to_string(cfg.weights.size()) +
                                    " does not match metric count " +
                                    std::to_string(cfg.metrics.size()));
  if (!(cfg.dpo_beta > 0)) fail("dpo.beta", "must be > 0");
  if (cfg.train_steps < 0) fail("train.steps", "must be >= 0");
  if (cfg.train_batch_size < 1) fail("train.batch_size", "must be >= 1");
  if (!(cfg.train_learning_rate > 0)) fail("train.learning_rate", "must be > 0");
  if (cfg.warmup_steps < 0) fail("train.warmup_steps", "must be >= 0");
  if (cfg.ref_update_interval < 0) fail("train.ref_update_interval", "must be >= 0 (0 disables)");
  if (!(cfg.weight_decay >= 0)) fail("train.weight_decay", "must be >= 0");
  if (cfg.eval_n_seeds < 1) fail("eval.n_seeds", "must be >= 1");
  if (cfg.units_per_condition < 1) fail("eval.units_per_condition", "must be >= 1");
  if (!(cfg.tie_value >= 0 && cfg.tie_value <= 1)) fail("eval.tie_value", "must be in [0, 1]");

  cfg.build_registry();  // validates metric declarations and dimensions
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  cfg.metrics.clear();

  std::string section;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string raw;

  using Setter = std::function<void(const std::string&, std::string_view)>;
  const std::unordered_map<std::string, Setter> setters = {
      {"data.d", [&](const std::string& p, std::string_view v) { cfg.d = (int)integer(p, v); }},
      {"data.num_conditions",
       [&](const std::string& p, std::string_view v) { cfg.num_conditions = (int)integer(p, v); }},
      {"data.mixture_radius",
       [&](const std::string& p, std::string_view v) { cfg.mixture_radius = num(p, v); }},
      {"data.mixture_stddev",
       [&](const std::string& p, std::string_view v) { cfg.mixture_stddev = num(p, v); }},
      {"data.pairs_per_condition",
       [&](const std::string& p, std::string_view v) {
         cfg.pairs_per_condition = (int)integer(p, v);
       }},
      {"rewards.metric",
       [&](const std::string&, std::string_view v) { cfg.metrics.push_back(parse_metric_decl(v)); }},
      {"diffusion.t_steps",
       [&](const std::string& p, std::string_view v) { cfg.t_steps = (int)integer(p, v); }},
      {"diffusion.beta_min",
       [&](const std::string& p, std::string_view v) { cfg.beta_min = num(p, v); }},
      {"diffusion.beta_max",
       [&](const std::string& p, std::string_view v) { cfg.beta_max = num(p, v); }},
      {"diffusion.hidden",
       [&](const std::string& p, std::string_view v) { cfg.hidden = (int)integer(p, v); }},
      {"diffusion.time_features",
       [&](const std::string& p, std::string_view v) { cfg.time_features = (int)integer(p, v); }},
      {"diffusion.omega",
       [&](const std::string&, std::string_view v) { cfg.omega = omega_mode_from_string(v); }},
      {"pretrain.steps",
       [&](const std::string& p, std::string_view v) { cfg.pretrain_steps = (int)integer(p, v); }},
      {"pretrain.batch_size",
       [&](const std::string& p, std::string_view v) {
         cfg.pretrain_batch_size = (int)integer(p, v);
       }},
      {"pretrain.learning_rate",
       [&](const std::string& p, std::string_view v) { cfg.pretrain_learning_rate = num(p, v); }},
      {"pretrain.optimizer",
       [&](const std::string&, std::string_view v) {
         cfg.pretrain_optimizer = optimizer_kind_from_string(v);
       }},
      {"aggregation.tie_policy",
       [&](const std::string&, std::string_view v) { cfg.tie_policy = tie_policy_from_string(v); }},
      {"aggregation.margin",
       [&](const std::string& p, std::string_view v) { cfg.margin = num(p, v); }},
      {"aggregation.paper_faithful_votes",
       [&](const std::string& p, std::string_view v) { cfg.paper_faithful_votes = boolean(p, v); }},
      {"aggregation.weights",
       [&](const std::string& p, std::string_view v) { cfg.weights = parse_weights(p, v); }},
      {"dpo.beta", [&](const std::string& p, std::string_view v) { cfg.dpo_beta = num(p, v); }},
      {"train.steps",
       [&](const std::string& p, std::string_view v) { cfg.train_steps = (int)integer(p, v); }},
      {"train.batch_size",
       [&](const std::string& p, std::string_view v) { cfg.train_batch_size = (int)integer(p, v); }},
      {"train.learning_rate",
       [&](const std::string& p, std::string_view v) { cfg.train_learning_rate = num(p, v); }},
      {"train.warmup_steps",
       [&](const std::string& p, std::string_view v) { cfg.warmup_steps = (int)integer(p, v); }},
      {"train.ref_update_interval",
       [&](const std::string& p, std::string_view v) {
         cfg.ref_update_interval = (int)integer(p, v);
       }},
      {"train.optimizer",
       [&](const std::string&, std::string_view v) {
         cfg.train_optimizer = optimizer_kind_from_string(v);
       }},
      {"train.weight_decay",
       [&](const std::string& p, std::string_view v) { cfg.weight_decay = num(p, v); }},
      {"eval.n_seeds",
       [&](const std::string& p, std::string_view v) { cfg.eval_n_seeds = (int)integer(p, v); }},
      {"eval.units_per_condition",
       [&](const std::string& p, std::string_view v) {
         cfg.units_per_condition = (int)integer(p, v);
       }},
      {"eval.tie_value",
       [&](const std::string& p, std::string_view v) { cfg.tie_value = num(p, v); }},
      {"run.seed",
       [&](const std::string& p, std::string_view v) {
         cfg.seed = static_cast<std::uint64_t>(integer(p, v));
       }},
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(origin + ":" + std::to_string(line_no), "malformed section header '" +
                                                         std::string(line) + "'");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(origin + ":" + std::to_string(line_no), "expected 'key = value', got '" +
                                                       std::string(line) + "'");
    std::string key = std::string(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (section.empty())
      fail(origin + ":" + std::to_string(line_no), "key '" + key + "' outside any section");
    std::string path = section + "." + key;
    auto it = setters.find(path);
    if (it == setters.end())
      fail(origin + ":" + std::to_string(line_no), "unknown key '" + path + "'");
    it->second(path, value);
  }

  normalize(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[data]\n";
  out << "d = " << cfg.d << '\n';
  out << "num_conditions = " << cfg.num_conditions << '\n';
  out << "mixture_radius = " << format_double(cfg.mixture_radius) << '\n';
  out << "mixture_stddev = " << format_double(cfg.mixture_stddev) << '\n';
  out << "pairs_per_condition = " << cfg.pairs_per_condition << '\n';
  out << "\n[rewards]\n";
  for (const auto& m : cfg.metrics) {
    out << "metric = " << m.metric_id << ' ' << to_string(m.kind) << ' '
        << format_double(m.scale);
    if (m.rho) out << " rho=" << format_double(*m.rho);
    if (m.radius) out << " radius=" << format_double(*m.radius);
    out << '\n';
  }
  out << "\n[diffusion]\n";
  out << "t_steps = " << cfg.t_steps << '\n';
  out << "beta_min = " << format_double(cfg.beta_min) << '\n';
  out << "beta_max = " << format_double(cfg.beta_max) << '\n';
  out << "hidden = " << cfg.hidden << '\n';
  out << "time_features = " << cfg.time_features << '\n';
  out << "omega = " << to_string(cfg.omega) << '\n';
  out << "\n[pretrain]\n";
  out << "steps = " << cfg.pretrain_steps << '\n';
  out << "batch_size = " << cfg.pretrain_batch_size << '\n';
  out << "learning_rate = " << format_double(cfg.pretrain_learning_rate) << '\n';
  out << "optimizer = " << to_string(cfg.pretrain_optimizer) << '\n';
  out << "\n[aggregation]\n";
  out << "tie_policy = " << to_string(cfg.tie_policy) << '\n';
  out << "margin = " << format_double(cfg.margin) << '\n';
  out << "paper_faithful_votes = " << (cfg.paper_faithful_votes ? 1 : 0) << '\n';
  if (!cfg.weights.empty()) {
    out << "weights =";
    for (double w : cfg.weights) out << ' ' << format_double(w);
    out << '\n';
  }
  out << "\n[dpo]\n";
  out << "beta = " << format_double(cfg.dpo_beta) << '\n';
  out << "\n[train]\n";
  out << "steps = " << cfg.train_steps << '\n';
  out << "batch_size = " << cfg.train_batch_size << '\n';
  out << "learning_rate = " << format_double(cfg.train_learning_rate) << '\n';
  out << "warmup_steps = " << cfg.warmup_steps << '\n';
  out << "ref_update_interval = " << cfg.ref_update_interval << '\n';
  out << "optimizer = " << to_string(cfg.train_optimizer) << '\n';
  out << "weight_decay = " << format_double(cfg.weight_decay) << '\n';
  out << "\n[eval]\n";
  out << "n_seeds = " << cfg.eval_n_seeds << '\n';
  out << "units_per_condition = " << cfg.units_per_condition << '\n';
  out << "tie_value = " << format_double(cfg.tie_value) << '\n';
  out << "\n[run]\n";
  out << "seed = " << cfg.seed << '\n';
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = fnv1a64(render_config(cfg));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bdpo
