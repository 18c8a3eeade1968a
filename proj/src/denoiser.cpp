#include "bdpo/denoiser.hpp"

#include <cmath>
#include <string>

#include "bdpo/errors.hpp"

namespace bdpo {

std::size_t DenoiserConfig::param_count() const {
  ParamLayout layout(*this);
  return layout.total;
}

ParamLayout::ParamLayout(const DenoiserConfig& cfg) {
  if (cfg.d < 1 || cfg.m < 1 || cfg.c < 1 || cfg.h < 1)
    throw ValidationError("denoiser sizes must all be >= 1");
  const std::size_t in = static_cast<std::size_t>(cfg.input_dim());
  const std::size_t h = static_cast<std::size_t>(cfg.h);
  const std::size_t d = static_cast<std::size_t>(cfg.d);
  w1 = 0;
  b1 = w1 + h * in;
  w2 = b1 + h;
  b2 = w2 + h * h;
  w3 = b2 + h;
  b3 = w3 + d * h;
  total = b3 + d;
}

DenoiserParams DenoiserParams::zeros(const DenoiserConfig& cfg) {
  DenoiserParams p;
  p.cfg = cfg;
  p.w.assign(cfg.param_count(), 0.0);
  return p;
}

DenoiserParams DenoiserParams::random_init(const DenoiserConfig& cfg, RngStream& rng) {
  DenoiserParams p = zeros(cfg);
  ParamLayout lay(cfg);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(cfg.input_dim()));
  const double s23 = 1.0 / std::sqrt(static_cast<double>(cfg.h));
  for (std::size_t i = lay.w1; i < lay.b1; ++i) p.w[i] = s1 * rng.normal();
  for (std::size_t i = lay.w2; i < lay.b2; ++i) p.w[i] = s23 * rng.normal();
  for (std::size_t i = lay.w3; i < lay.b3; ++i) p.w[i] = s23 * rng.normal();
  return p;
}

void time_features(int t, int m, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(2 * m))
    throw ValidationError("time feature buffer size mismatch");
  for (int j = 0; j < m; ++j) {
    double freq = std::exp(-std::log(10000.0) * j / m);
    out[j] = std::sin(t * freq);
    out[m + j] = std::cos(t * freq);
  }
}

namespace {

void affine(const double* w, const double* b, std::span<const double> in, std::size_t rows,
            std::span<double> out) {
  const std::size_t cols = in.size();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* row = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * in[c];
    out[r] = acc;
  }
}

}  // namespace

void denoise_into(const DenoiserParams& params, std::span<const double> x_t, int t,
                  const Condition& c, DenoiserWorkspace& ws, std::span<double> out) {
  const DenoiserConfig& cfg = params.cfg;
  if (x_t.size() != static_cast<std::size_t>(cfg.d))
    throw ValidationError("denoise: x_t has size " + std::to_string(x_t.size()) +
                          ", expected " + std::to_string(cfg.d));
  if (c.id < 0 || c.id >= cfg.c)
    throw ValidationError("denoise: condition " + std::to_string(c.id) +
                          " outside 0.." + std::to_string(cfg.c - 1));
  if (params.w.size() != cfg.param_count())
    throw ValidationError("denoise: parameter vector size mismatch");
  if (out.size() != static_cast<std::size_t>(cfg.d))
    throw ValidationError("denoise: output buffer size mismatch");

  const std::size_t in_dim = static_cast<std::size_t>(cfg.input_dim());
  const std::size_t h = static_cast<std::size_t>(cfg.h);
  ws.input.assign(in_dim, 0.0);
  for (int i = 0; i < cfg.d; ++i) ws.input[i] = x_t[i];
  time_features(t, cfg.m, std::span<double>(ws.input).subspan(cfg.d, 2 * cfg.m));
  ws.input[static_cast<std::size_t>(cfg.d + 2 * cfg.m + c.id)] = 1.0;

  ParamLayout lay(cfg);
  ws.a1.resize(h);
  ws.a2.resize(h);
  affine(params.w.data() + lay.w1, params.w.data() + lay.b1, ws.input, h, ws.a1);
  for (double& v : ws.a1) v = std::tanh(v);
  affine(params.w.data() + lay.w2, params.w.data() + lay.b2, ws.a1, h, ws.a2);
  for (double& v : ws.a2) v = std::tanh(v);
  affine(params.w.data() + lay.w3, params.w.data() + lay.b3, ws.a2,
         static_cast<std::size_t>(cfg.d), out);

  ws.out.assign(out.begin(), out.end());
}

std::vector<double> denoise(const DenoiserParams& params, std::span<const double> x_t, int t,
                            const Condition& c) {
  std::vector<double> out(static_cast<std::size_t>(params.cfg.d));
  DenoiserWorkspace ws;
  denoise_into(params, x_t, t, c, ws, out);
  return out;
}

void denoise_backward(const DenoiserParams& params, DenoiserWorkspace& ws,
                      std::span<const double> d_out, std::span<double> grad) {
  const DenoiserConfig& cfg = params.cfg;
  ParamLayout lay(cfg);
  const std::size_t h = static_cast<std::size_t>(cfg.h);
  const std::size_t d = static_cast<std::size_t>(cfg.d);
  const std::size_t in_dim = ws.input.size();
  if (d_out.size() != d || grad.size() != lay.total || ws.a1.size() != h)
    throw ValidationError("denoise_backward: buffer size mismatch");

  // Output layer: out = w3 a2 + b3.
  for (std::size_t r = 0; r < d; ++r) {
    grad[lay.b3 + r] += d_out[r];
    double* g = grad.data() + lay.w3 + r * h;
    for (std::size_t c = 0; c < h; ++c) g[c] += d_out[r] * ws.a2[c];
  }
  ws.d2.assign(h, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    const double* row = params.w.data() + lay.w3 + r * h;
    for (std::size_t c = 0; c < h; ++c) ws.d2[c] += d_out[r] * row[c];
  }
  // Through tanh of layer 2.
  for (std::size_t c = 0; c < h; ++c) ws.d2[c] *= 1.0 - ws.a2[c] * ws.a2[c];

  for (std::size_t r = 0; r < h; ++r) {
    grad[lay.b2 + r] += ws.d2[r];
    double* g = grad.data() + lay.w2 + r * h;
    for (std::size_t c = 0; c < h; ++c) g[c] += ws.d2[r] * ws.a1[c];
  }
  ws.d1.assign(h, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = params.w.data() + lay.w2 + r * h;
    for (std::size_t c = 0; c < h; ++c) ws.d1[c] += ws.d2[r] * row[c];
  }
  for (std::size_t c = 0; c < h; ++c) ws.d1[c] *= 1.0 - ws.a1[c] * ws.a1[c];

  for (std::size_t r = 0; r < h; ++r) {
    grad[lay.b1 + r] += ws.d1[r];
    double* g = grad.data() + lay.w1 + r * in_dim;
    for (std::size_t c = 0; c < in_dim; ++c) g[c] += ws.d1[r] * ws.input[c];
  }
}

}  // namespace bdpo
