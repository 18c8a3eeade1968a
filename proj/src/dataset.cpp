#include "bdpo/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "bdpo/errors.hpp"
#include "bdpo/text.hpp"

namespace bdpo {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

void check_metric_id(const std::string& id) {
  require(!id.empty(), "empty metric id");
  for (char c : id)
    require(c != ',' && c != '#' && c != ' ' && c != '\t',
            "metric id '" + id + "' contains a reserved character");
}

void check_finite(std::span<const double> v, std::int64_t pair_id, const char* what) {
  for (double x : v)
    require(std::isfinite(x), std::string(what) + " of pair " +
                                  std::to_string(pair_id) + " is not finite");
}

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line_no,
                          const std::string& msg) {
  throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
}

}  // namespace

namespace {

void validate_against(const DatasetMeta& meta, std::span<const PreferencePair> pairs) {
  require(meta.d > 0, "dataset meta: d must be positive");
  require(meta.k > 0, "dataset meta: k must be positive");
  require(meta.metric_ids.size() == static_cast<std::size_t>(meta.k),
          "dataset meta: metric id count does not match k");
  for (const std::string& id : meta.metric_ids) check_metric_id(id);

  for (const PreferencePair& p : pairs) {
    const std::string where = "pair " + std::to_string(p.pair_id);
    require(p.sample_a.x.size() == static_cast<std::size_t>(meta.d) &&
                p.sample_b.x.size() == static_cast<std::size_t>(meta.d),
            where + " sample dimension differs from the first pair");
    require(p.scores_a.values.size() == static_cast<std::size_t>(meta.k) &&
                p.scores_b.values.size() == static_cast<std::size_t>(meta.k),
            where + " score count differs from the first pair");
    require(p.scores_a.metric_ids == meta.metric_ids &&
                p.scores_b.metric_ids == meta.metric_ids,
            where + " metric ids differ from the first pair");
    check_finite(p.sample_a.x, p.pair_id, "sample_a");
    check_finite(p.sample_b.x, p.pair_id, "sample_b");
    check_finite(p.scores_a.values, p.pair_id, "scores_a");
    check_finite(p.scores_b.values, p.pair_id, "scores_b");
    if (p.votes) {
      require(p.votes->votes.size() == static_cast<std::size_t>(meta.k),
              where + " vote count differs from the metric count");
      for (int v : p.votes->votes)
        require(v == -1 || v == 0 || v == 1,
                where + " has a vote outside {-1, 0, +1}");
    }
    if (p.consensus)
      require(p.consensus->s == -1 || p.consensus->s == 1,
              where + " has a consensus label outside {-1, +1}");
  }
}

}  // namespace

DatasetMeta dataset_meta(std::span<const PreferencePair> pairs) {
  require(!pairs.empty(), "dataset is empty; no header can be inferred");
  const PreferencePair& first = pairs.front();
  DatasetMeta meta;
  meta.d = static_cast<int>(first.sample_a.x.size());
  meta.k = static_cast<int>(first.scores_a.values.size());
  meta.metric_ids = first.scores_a.metric_ids;
  validate_against(meta, pairs);
  return meta;
}

void write_dataset(std::span<const PreferencePair> pairs,
                   const std::filesystem::path& path,
                   const DatasetMeta& meta, std::span<const std::string> comment_lines) {
  validate_against(meta, pairs);

  std::ostringstream out;
  out << "#balanced-pref v1 d=" << meta.d << " k=" << meta.k << " metrics=";
  for (int i = 0; i < meta.k; ++i) {
    if (i) out << ',';
    out << meta.metric_ids[i];
  }
  out << '\n';
  for (const std::string& line : comment_lines) out << "# " << line << '\n';

  for (const PreferencePair& p : pairs) {
    out << p.pair_id << ',' << p.condition.id;
    for (double x : p.sample_a.x) out << ',' << format_double(x);
    for (double x : p.sample_b.x) out << ',' << format_double(x);
    for (double s : p.scores_a.values) out << ',' << format_double(s);
    for (double s : p.scores_b.values) out << ',' << format_double(s);
    if (p.votes) {
      for (int v : p.votes->votes) out << ',' << v;
    } else {
      out << ",-";
    }
    if (p.consensus) {
      out << (p.consensus->s > 0 ? ",+1," : ",-1,") << (p.consensus->tie_broken ? 1 : 0);
    } else {
      out << ",-,-";
    }
    out << '\n';
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file << out.str();
  file.flush();
  if (!file) throw IoError("write to " + path.string() + " failed");
}

void write_dataset(std::span<const PreferencePair> pairs,
                   const std::filesystem::path& path,
                   std::span<const std::string> comment_lines) {
  write_dataset(pairs, path, dataset_meta(pairs), comment_lines);
}

std::vector<PreferencePair> read_dataset(const std::filesystem::path& path,
                                         DatasetMeta* meta_out) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string() + " for reading");

  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(file, line)) fail_at(path, 1, "missing header line");
  ++line_no;
  line = std::string(trim(line));

  DatasetMeta meta;
  {
    auto tokens = split(line, ' ');
    if (tokens.size() != 5 || tokens[0] != "#balanced-pref" || tokens[1] != "v1" ||
        !tokens[2].starts_with("d=") || !tokens[3].starts_with("k=") ||
        !tokens[4].starts_with("metrics="))
      fail_at(path, line_no, "malformed header: '" + line + "'");
    try {
      meta.d = static_cast<int>(parse_int(tokens[2].substr(2)));
      meta.k = static_cast<int>(parse_int(tokens[3].substr(2)));
    } catch (const ValidationError& e) {
      fail_at(path, line_no, e.what());
    }
    if (meta.d <= 0 || meta.k <= 0)
      fail_at(path, line_no, "header d and k must be positive");
    for (std::string_view id : split(tokens[4].substr(8), ','))
      meta.metric_ids.emplace_back(id);
    if (meta.metric_ids.size() != static_cast<std::size_t>(meta.k))
      fail_at(path, line_no, "header lists " + std::to_string(meta.metric_ids.size()) +
                                 " metric ids but k=" + std::to_string(meta.k));
  }

  const std::size_t base = 2 + 2 * static_cast<std::size_t>(meta.d) +
                           2 * static_cast<std::size_t>(meta.k);
  const std::size_t with_votes = base + static_cast<std::size_t>(meta.k) + 2;
  const std::size_t without_votes = base + 3;

  std::vector<PreferencePair> pairs;
  while (std::getline(file, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;

    auto f = split(sv, ',');
    const bool has_votes = f.size() > base && f[base] != "-";
    if (f.size() != (has_votes ? with_votes : without_votes))
      fail_at(path, line_no,
              "expected " + std::to_string(with_votes) + " or " +
                  std::to_string(without_votes) + " fields, got " +
                  std::to_string(f.size()));

    PreferencePair p;
    try {
      std::size_t i = 0;
      p.pair_id = parse_int(f[i++]);
      p.condition.id = static_cast<int>(parse_int(f[i++]));
      p.sample_a.x.reserve(meta.d);
      for (int j = 0; j < meta.d; ++j) p.sample_a.x.push_back(parse_double(f[i++]));
      p.sample_b.x.reserve(meta.d);
      for (int j = 0; j < meta.d; ++j) p.sample_b.x.push_back(parse_double(f[i++]));
      p.scores_a.metric_ids = meta.metric_ids;
      p.scores_b.metric_ids = meta.metric_ids;
      for (int j = 0; j < meta.k; ++j) p.scores_a.values.push_back(parse_double(f[i++]));
      for (int j = 0; j < meta.k; ++j) p.scores_b.values.push_back(parse_double(f[i++]));
      if (has_votes) {
        VoteVector vv;
        for (int j = 0; j < meta.k; ++j) {
          int v = static_cast<int>(parse_int(f[i++]));
          if (v < -1 || v > 1) throw ValidationError("vote outside {-1, 0, +1}");
          vv.votes.push_back(v);
        }
        p.votes = std::move(vv);
      } else {
        ++i;  // the lone '-'
      }
      std::string_view cons = f[i++];
      std::string_view tie = f[i++];
      if (cons == "-") {
        if (tie != "-") throw ValidationError("tie_broken set without a consensus");
      } else {
        ConsensusLabel label;
        if (cons == "+1") label.s = 1;
        else if (cons == "-1") label.s = -1;
        else throw ValidationError("consensus must be +1, -1 or -, got '" +
                                   std::string(cons) + "'");
        if (tie == "0") label.tie_broken = false;
        else if (tie == "1") label.tie_broken = true;
        else throw ValidationError("tie_broken must be 0, 1 or -, got '" +
                                   std::string(tie) + "'");
        p.consensus = label;
      }
    } catch (const ValidationError& e) {
      fail_at(path, line_no, e.what());
    }
    pairs.push_back(std::move(p));
  }

  if (meta_out) *meta_out = std::move(meta);
  return pairs;
}

}  // namespace bdpo
