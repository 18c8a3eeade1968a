#include "bdpo/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bdpo/diffusion.hpp"
#include "bdpo/errors.hpp"
#include "bdpo/rng.hpp"

namespace bdpo {
namespace {

std::string percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", rate * 100.0);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file << text;
  file.flush();
  if (!file) throw IoError("write to " + path.string() + " failed");
}

}  // namespace

BestScores best_scores(const DenoiserParams& params, const NoiseSchedule& schedule,
                       const EvalConfig& cfg, std::uint64_t seed) {
  if (cfg.n_seeds < 1) throw ValidationError("eval needs n_seeds >= 1");
  if (cfg.units.empty()) throw ValidationError("eval needs at least one condition unit");
  if (cfg.registry.specs.empty()) throw ValidationError("eval needs a reward registry");

  RngStream root = RngStream(seed).split("eval");
  BestScores out;
  out.units = cfg.units;
  out.metric_ids = cfg.registry.metric_ids();
  const std::size_t k = out.metric_ids.size();
  out.best.assign(cfg.units.size(), std::vector<double>(k));

  for (std::size_t u = 0; u < cfg.units.size(); ++u) {
    RngStream unit_stream = root.split(static_cast<std::uint64_t>(u));
    for (int j = 0; j < cfg.n_seeds; ++j) {
      RngStream draw = unit_stream.split(static_cast<std::uint64_t>(j));
      Sample s = sample(params, schedule, cfg.units[u], draw);
      ScoreVector scores = score_all(cfg.registry, cfg.units[u], s);
      for (std::size_t i = 0; i < k; ++i)
        out.best[u][i] = j == 0 ? scores.values[i] : std::max(out.best[u][i], scores.values[i]);
    }
  }
  return out;
}

WinRateReport win_rate(const BestScores& a, const BestScores& b, double tie_value,
                       std::string model_a, std::string model_b) {
  if (a.units != b.units)
    throw ValidationError("win_rate: the two models were evaluated on different units");
  if (a.metric_ids != b.metric_ids)
    throw ValidationError("win_rate: the two models were scored with different metrics");
  if (a.units.empty()) throw ValidationError("win_rate: empty evaluation");

  WinRateReport rep;
  rep.model_a = std::move(model_a);
  rep.model_b = std::move(model_b);
  rep.metric_ids = a.metric_ids;
  rep.n_units = static_cast<int>(a.units.size());
  const std::size_t k = a.metric_ids.size();
  rep.win_rate.assign(k, 0.0);
  rep.ties.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    double wins = 0.0;
    for (std::size_t u = 0; u < a.units.size(); ++u) {
      if (a.best[u][i] > b.best[u][i]) {
        wins += 1.0;
      } else if (a.best[u][i] == b.best[u][i]) {
        wins += tie_value;
        ++rep.ties[i];
      }
    }
    rep.win_rate[i] = wins / static_cast<double>(rep.n_units);
  }
  return rep;
}

void write_report(std::span<const WinRateReport> reports, const std::filesystem::path& csv_path,
                  std::span<const std::string> comment_lines) {
  if (reports.empty()) throw ValidationError("write_report needs at least one comparison");

  std::ostringstream csv;
  for (const std::string& line : comment_lines) csv << "# " << line << '\n';
  csv << "comparison,metric,win_rate_percent,ties,n\n";
  for (const WinRateReport& rep : reports) {
    std::string comparison = rep.model_a + "_vs_" + rep.model_b;
    for (std::size_t i = 0; i < rep.metric_ids.size(); ++i)
      csv << comparison << ',' << rep.metric_ids[i] << ',' << percent(rep.win_rate[i]) << ','
          << rep.ties[i] << ',' << rep.n_units << '\n';
  }
  write_text(csv_path, csv.str());

  for (const WinRateReport& rep : reports) {
    std::string comparison = rep.model_a + "_vs_" + rep.model_b;
    std::filesystem::path dat = csv_path;
    dat.replace_filename(csv_path.stem().string() + "_" + comparison + ".dat");
    std::ostringstream out;
    out << "# metric win_rate_percent\n";
    for (std::size_t i = 0; i < rep.metric_ids.size(); ++i)
      out << rep.metric_ids[i] << ' ' << percent(rep.win_rate[i]) << '\n';
    write_text(dat, out.str());
  }
}

std::string render_report(std::span<const WinRateReport> reports) {
  std::ostringstream out;
  for (const WinRateReport& rep : reports) {
    std::size_t width = 6;
    for (const std::string& id : rep.metric_ids) width = std::max(width, id.size());
    out << rep.model_a << " vs " << rep.model_b << "  (n=" << rep.n_units << ")\n";
    out << "  " << std::string(width - 6, ' ') << "metric    win%  ties\n";
    for (std::size_t i = 0; i < rep.metric_ids.size(); ++i) {
      std::string pct = percent(rep.win_rate[i]);
      out << "  " << std::string(width - rep.metric_ids[i].size(), ' ') << rep.metric_ids[i]
          << "  " << std::string(pct.size() < 6 ? 6 - pct.size() : 0, ' ') << pct << "  "
          << rep.ties[i] << '\n';
    }
    out << '\n';
  }
  return out.str();
}

void write_ablation_table(std::span<const AblationRow> rows, const std::filesystem::path& path,
                          std::span<const std::string> comment_lines) {
  std::ostringstream out;
  for (const std::string& line : comment_lines) out << "# " << line << '\n';
  out << "model,ref_refresh,multi_metric,metric,win_rate_percent\n";
  for (const AblationRow& row : rows)
    out << row.model << ',' << (row.ref_refresh ? 1 : 0) << ',' << (row.multi_metric ? 1 : 0)
        << ',' << row.metric << ',' << percent(row.win_rate) << '\n';
  write_text(path, out.str());
}

}  // namespace bdpo
