#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "bdpo/denoiser.hpp"
#include "bdpo/schedule.hpp"

namespace bdpo {

// A trained model plus the schedule recipe it was trained against, so a
// loaded checkpoint samples with the exact same noise process.
struct Checkpoint {
  DenoiserParams params;
  ScheduleRecipe schedule;
  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// Text format: one versioned header line carrying the architecture and
// schedule, optional '#' comment lines, then one parameter per line in
// flat layer order at full round-trip precision. Written atomically
// (temp file + rename).
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path,
                     std::span<const std::string> comment_lines = {});

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace bdpo
