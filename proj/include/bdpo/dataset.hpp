#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bdpo/types.hpp"

namespace bdpo {

struct DatasetMeta {
  int d = 0;
  int k = 0;
  std::vector<std::string> metric_ids;
  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

// Infers d/K/metric ids from the first pair and checks every pair against
// them. Throws ValidationError naming the first offending pair_id.
DatasetMeta dataset_meta(std::span<const PreferencePair> pairs);

// Line-delimited text: one header line, optional '#' comment lines, one
// record per pair. comment_lines are emitted verbatim after the header,
// each prefixed with "# ". The meta overload allows an empty dataset
// (header only); the span-only overload infers the header from the pairs.
void write_dataset(std::span<const PreferencePair> pairs, const std::filesystem::path& path,
                   const DatasetMeta& meta, std::span<const std::string> comment_lines = {});
void write_dataset(std::span<const PreferencePair> pairs,
                   const std::filesystem::path& path,
                   std::span<const std::string> comment_lines = {});

// Throws IoError if the file cannot be opened, ValidationError with a
// path:line prefix for malformed content.
std::vector<PreferencePair> read_dataset(const std::filesystem::path& path,
                                         DatasetMeta* meta_out = nullptr);

}  // namespace bdpo
