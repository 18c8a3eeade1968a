#include "bdpo/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "bdpo/errors.hpp"
#include "bdpo/text.hpp"

namespace bdpo {

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path,
                     std::span<const std::string> comment_lines) {
  const DenoiserConfig& cfg = ckpt.params.cfg;
  if (ckpt.params.w.size() != cfg.param_count())
    throw ValidationError("checkpoint parameter vector size mismatch");

  std::ostringstream out;
  out << "#bdpo-ckpt v1 d=" << cfg.d << " m=" << cfg.m << " c=" << cfg.c << " h=" << cfg.h
      << " t=" << ckpt.schedule.t_steps << " beta_min=" << format_double(ckpt.schedule.beta_min)
      << " beta_max=" << format_double(ckpt.schedule.beta_max) << '\n';
  for (const std::string& line : comment_lines) out << "# " << line << '\n';
  for (double v : ckpt.params.w) out << format_double(v) << '\n';

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + tmp.string() + " for writing");
    file << out.str();
    file.flush();
    if (!file) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string() + " for reading");

  std::string line;
  if (!std::getline(file, line))
    throw ValidationError(path.string() + ":1: missing checkpoint header");
  auto tokens = split(trim(line), ' ');
  auto field = [&](std::size_t i, std::string_view prefix) -> std::string_view {
    if (i >= tokens.size() || !tokens[i].starts_with(prefix))
      throw ValidationError(path.string() + ":1: malformed checkpoint header: '" + line + "'");
    return tokens[i].substr(prefix.size());
  };
  if (tokens.size() != 9 || tokens[0] != "#bdpo-ckpt" || tokens[1] != "v1")
    throw ValidationError(path.string() + ":1: malformed checkpoint header: '" + line + "'");

  Checkpoint ckpt;
  try {
    ckpt.params.cfg.d = static_cast<int>(parse_int(field(2, "d=")));
    ckpt.params.cfg.m = static_cast<int>(parse_int(field(3, "m=")));
    ckpt.params.cfg.c = static_cast<int>(parse_int(field(4, "c=")));
    ckpt.params.cfg.h = static_cast<int>(parse_int(field(5, "h=")));
    ckpt.schedule.t_steps = static_cast<int>(parse_int(field(6, "t=")));
    ckpt.schedule.beta_min = parse_double(field(7, "beta_min="));
    ckpt.schedule.beta_max = parse_double(field(8, "beta_max="));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ":1: " + e.what());
  }

  const std::size_t expected = ckpt.params.cfg.param_count();
  ckpt.params.w.reserve(expected);
  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    try {
      ckpt.params.w.push_back(parse_double(sv));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (ckpt.params.w.size() != expected)
    throw ValidationError(path.string() + ": header promises " + std::to_string(expected) +
                          " parameters, file has " + std::to_string(ckpt.params.w.size()));
  return ckpt;
}

}  // namespace bdpo
