#include "bdpo/dpo.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bdpo/counters.hpp"
#include "bdpo/errors.hpp"

namespace bdpo {

LossMode loss_mode_from_string(std::string_view name) {
  if (name == "balanced") return LossMode::balanced;
  if (name == "vanilla") return LossMode::vanilla;
  if (name == "normalized") return LossMode::normalized;
  if (name == "random") return LossMode::random;
  if (name == "single") return LossMode::single;
  throw ValidationError("unknown loss mode '" + std::string(name) + "'");
}

std::string_view to_string(LossMode mode) {
  switch (mode) {
    case LossMode::balanced: return "balanced";
    case LossMode::vanilla: return "vanilla";
    case LossMode::normalized: return "normalized";
    case LossMode::random: return "random";
    case LossMode::single: return "single";
  }
  throw ValidationError("unknown loss mode value");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus_neg(double z) {
  if (z >= 0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double bt_probability(double r_w, double r_l) { return sigmoid(r_w - r_l); }

double bt_loss(std::span<const std::pair<double, double>> rewards) {
  if (rewards.empty()) throw ValidationError("bt_loss needs at least one pair");
  double acc = 0.0;
  for (const auto& [r_w, r_l] : rewards) acc += softplus_neg(r_w - r_l);
  return acc / static_cast<double>(rewards.size());
}

namespace {

double squared_error(std::span<const double> pred, std::span<const double> target) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double r = pred[i] - target[i];
    acc += r * r;
  }
  return acc;
}

// Forward passes for one pair. Retains the theta activations so a caller
// can push gradients back once the loss coefficient is known.
struct PairForward {
  DenoiserWorkspace ws_a, ws_b, ws_scratch;
  std::vector<double> out_a, out_b, out_ref, d_out;
};

double eval_l(const ModelPair& models, const PairLossInputs& in, const NoiseSchedule& schedule,
              PairForward& fw) {
  const PreferencePair& pair = *in.pair;
  const std::size_t d = static_cast<std::size_t>(models.theta.cfg.d);
  if (in.eps_a.size() != d || in.eps_b.size() != d)
    throw ValidationError("pair " + std::to_string(pair.pair_id) + ": eps dimension mismatch");
  if (models.ref.cfg != models.theta.cfg)
    throw ValidationError("theta and ref have different architectures");

  std::vector<double> x_ta = forward_noise(schedule, pair.sample_a.x, in.t, in.eps_a);
  std::vector<double> x_tb = forward_noise(schedule, pair.sample_b.x, in.t, in.eps_b);

  fw.out_a.resize(d);
  fw.out_b.resize(d);
  fw.out_ref.resize(d);
  denoise_into(models.theta, x_ta, in.t, pair.condition, fw.ws_a, fw.out_a);
  denoise_into(models.theta, x_tb, in.t, pair.condition, fw.ws_b, fw.out_b);
  double gap_a = squared_error(fw.out_a, in.eps_a);
  double gap_b = squared_error(fw.out_b, in.eps_b);
  denoise_into(models.ref, x_ta, in.t, pair.condition, fw.ws_scratch, fw.out_ref);
  gap_a -= squared_error(fw.out_ref, in.eps_a);
  denoise_into(models.ref, x_tb, in.t, pair.condition, fw.ws_scratch, fw.out_ref);
  gap_b -= squared_error(fw.out_ref, in.eps_b);
  return -(gap_a - gap_b);
}

// dl/d(theta) contracted with coeff: the theta outputs enter l as
// -||out_a - eps_a||^2 + ||out_b - eps_b||^2.
void backprop_l(const ModelPair& models, const PairLossInputs& in, PairForward& fw,
                double coeff, std::span<double> grad) {
  const std::size_t d = fw.out_a.size();
  fw.d_out.resize(d);
  for (std::size_t i = 0; i < d; ++i)
    fw.d_out[i] = coeff * -2.0 * (fw.out_a[i] - in.eps_a[i]);
  denoise_backward(models.theta, fw.ws_a, fw.d_out, grad);
  for (std::size_t i = 0; i < d; ++i)
    fw.d_out[i] = coeff * 2.0 * (fw.out_b[i] - in.eps_b[i]);
  denoise_backward(models.theta, fw.ws_b, fw.d_out, grad);
}

std::vector<double> resolve_loss_weights(const DpoConfig& cfg, std::size_t k) {
  if (cfg.weights.empty()) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  if (cfg.weights.size() != k)
    throw ValidationError("loss weights count " + std::to_string(cfg.weights.size()) +
                          " does not match vote count " + std::to_string(k));
  return cfg.weights;
}

void check_batch(std::span<const PairLossInputs> batch, const DpoConfig& cfg,
                 std::span<const double> grad) {
  if (batch.empty()) throw ValidationError("loss needs a non-empty batch");
  if (!(cfg.beta > 0)) throw ValidationError("beta must be positive");
  for (const PairLossInputs& in : batch)
    if (!in.pair) throw ValidationError("loss input without a pair");
  (void)grad;
}

}  // namespace

double l_theta(const ModelPair& models, const PairLossInputs& in, const NoiseSchedule& schedule) {
  if (!in.pair) throw ValidationError("l_theta needs a pair");
  PairForward fw;
  return eval_l(models, in, schedule, fw);
}

double balanced_loss_and_grad(std::span<const PairLossInputs> batch, const ModelPair& models,
                              const NoiseSchedule& schedule, const DpoConfig& cfg,
                              std::span<double> grad) {
  check_batch(batch, cfg, grad);
  counters::loss_grad_evaluations.fetch_add(1, std::memory_order_relaxed);

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  PairForward fw;
  double loss = 0.0;
  for (const PairLossInputs& in : batch) {
    const PreferencePair& pair = *in.pair;
    if (!pair.consensus)
      throw ValidationError("pair " + std::to_string(pair.pair_id) + " has no consensus label");
    const double s = static_cast<double>(pair.consensus->s);
    double l = eval_l(models, in, schedule, fw);
    double z = cfg.beta * s * l;
    loss += softplus_neg(z) * inv_b;
    // d/dl of -log sigma(beta s l) = -beta s sigma(-beta s l)
    double coeff = -inv_b * cfg.beta * s * sigmoid(-z);
    backprop_l(models, in, fw, coeff, grad);
  }
  return loss;
}

double vanilla_loss_and_grad(std::span<const PairLossInputs> batch, const ModelPair& models,
                             const NoiseSchedule& schedule, const DpoConfig& cfg,
                             std::span<double> grad) {
  check_batch(batch, cfg, grad);
  counters::loss_grad_evaluations.fetch_add(1, std::memory_order_relaxed);

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  PairForward fw;
  double loss = 0.0;
  for (const PairLossInputs& in : batch) {
    const PreferencePair& pair = *in.pair;
    if (!pair.votes)
      throw ValidationError("pair " + std::to_string(pair.pair_id) + " has no votes");
    const std::vector<int>& votes = pair.votes->votes;
    std::vector<double> w = resolve_loss_weights(cfg, votes.size());

    double l = eval_l(models, in, schedule, fw);
    double coeff = 0.0;
    for (std::size_t k = 0; k < votes.size(); ++k) {
      if (votes[k] == 0) {
        loss += w[k] * std::numbers::ln2 * inv_b;  // abstention: constant, no gradient
        continue;
      }
      double s = static_cast<double>(votes[k]);
      double z = cfg.beta * s * l;
      loss += w[k] * softplus_neg(z) * inv_b;
      coeff += -inv_b * w[k] * cfg.beta * s * sigmoid(-z);
    }
    backprop_l(models, in, fw, coeff, grad);
  }
  return loss;
}

}  // namespace bdpo
