/*
Copyright (c) 2026 The nxcore Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "nxcore/common.hpp"
#include "nxcore/storage.hpp"

namespace nxcore {

/// A rewindable stream of raw (src, dst) index pairs.
class edge_source {
 public:
  virtual ~edge_source() = default;
  virtual void reset() = 0;
  virtual bool next(raw_index& src, raw_index& dst) = 0;
};

/// Parses a UTF-8 edge list: one "src <whitespace> dst" pair per line,
/// lines starting with '#' or '%' and blank lines ignored. Malformed lines
/// raise errc::parse_error carrying the line number.
class text_edge_source final : public edge_source {
 public:
  explicit text_edge_source(const std::filesystem::path& path);
  void reset() override;
  bool next(raw_index& src, raw_index& dst) override;

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::uint64_t line_no_ = 0;
};

class memory_edge_source final : public edge_source {
 public:
  explicit memory_edge_source(std::vector<std::pair<raw_index, raw_index>> edges)
      : edges_(std::move(edges)) {}
  void reset() override { next_ = 0; }
  bool next(raw_index& src, raw_index& dst) override {
    if (next_ >= edges_.size()) return false;
    src = edges_[next_].first;
    dst = edges_[next_].second;
    ++next_;
    return true;
  }

 private:
  std::vector<std::pair<raw_index, raw_index>> edges_;
  std::size_t next_ = 0;
};

/// Output of the degreeing step: a dense renumbering of every index that
/// appears on at least one edge, plus per-vertex degree counts (duplicates
/// included).
struct id_map {
  std::vector<raw_index> id_to_raw;  // ascending; dense id = position
  std::vector<degree_pair> degrees;  // by dense id
  std::uint64_t edge_count = 0;      // stored edges (doubled when symmetrized)

  std::uint64_t vertex_count() const { return id_to_raw.size(); }
};

/// First preprocessing step. Assigns dense ids in ascending raw-index order
/// to every endpoint seen in the stream; indices that never appear get no
/// id. When `symmetrize` is set every edge is counted in both orientations.
id_map degree(edge_source& source, bool symmetrize = false);

struct preprocess_options {
  std::uint32_t partitions = 16;
  bool symmetrize = false;
  bool build_transpose = false;
  /// Spill directory for the bucket pass; empty means $NXCORE_TMPDIR or
  /// <out>/.spill.
  std::filesystem::path tmp_dir;
};

/// Full two-step pipeline: degreeing, then sharding into P^2 sorted
/// sub-shard files plus manifest, mapping and degree files under `out_dir`.
graph_manifest preprocess_graph(edge_source& source, const std::filesystem::path& out_dir,
                                const preprocess_options& options);

/// Builds the reversed-edge shard grid (shards_t/) for an existing graph
/// directory and records it in the manifest. Same P, same id map.
graph_manifest build_transpose(const std::filesystem::path& dir);

/// Decodes every sub-shard of a graph directory back into an edge list in
/// dense ids (row-major cell order, stored order within cells).
std::vector<edge> decode_all_edges(const std::filesystem::path& dir,
                                   const graph_manifest& manifest,
                                   bool transposed = false);

}  // namespace nxcore
