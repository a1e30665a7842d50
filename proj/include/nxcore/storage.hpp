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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nxcore/common.hpp"
#include "nxcore/graph_model.hpp"
#include "nxcore/io_counters.hpp"

// On-disk layout of a preprocessed graph directory:
//
//   manifest.json            UTF-8 JSON: version, n, m, P, interval bounds,
//                            per-cell edge counts, relative file names
//   map.bin                  (raw_index u64, id u32) pairs, raw ascending
//   rmap.bin                 raw_index u64 per dense id
//   deg.bin                  (in u32, out u32) per dense id
//   shards/ss_<i>_<j>.nxss   sub-shard for sources in I_i, destinations in I_j
//   shards_t/...             same grid for the reversed edge multiset
//   intervals/iv_<j>.nxiv    attribute array of interval j (written by runs)
//   hubs/h_<i>_<j>.nxhb      per-sub-shard contribution records (written by runs)
//
// All fixed-width fields are little-endian. Grid indices in file names are
// zero-based.

namespace nxcore {

// ---------------------------------------------------------------------------
// Counted sequential file streams. These are the only road to disk for graph
// data; they feed io_counters and only ever move forward, so every access
// the engine issues is a single forward pass per file.

class counted_reader {
 public:
  counted_reader(const std::filesystem::path& path, io_category category);

  void read_exact(void* dst, std::size_t bytes);
  std::uint64_t offset() const { return offset_; }
  bool at_end();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  io_category category_;
  std::uint64_t offset_ = 0;
};

class counted_writer {
 public:
  counted_writer(const std::filesystem::path& path, io_category category);

  void write(const void* src, std::size_t bytes);
  std::uint64_t offset() const { return offset_; }
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  io_category category_;
  std::uint64_t offset_ = 0;
};

// ---------------------------------------------------------------------------
// Manifest

struct graph_manifest {
  std::uint32_t version = 1;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint32_t p = 0;
  std::uint32_t attr_width_default = 8;
  bool symmetrized = false;
  bool has_transpose = false;
  std::vector<interval_range> intervals;
  // edge_counts[i][j] = edges of sub-shard (i, j); lets schedulers skip
  // empty cells without touching the file system. record_counts holds the
  // distinct-destination count per cell, the denominator of the measured
  // average hub in-degree.
  std::vector<std::vector<std::uint64_t>> edge_counts;
  std::vector<std::vector<std::uint64_t>> record_counts;
  std::vector<std::vector<std::uint64_t>> edge_counts_transpose;
  std::vector<std::vector<std::uint64_t>> record_counts_transpose;

  const interval_range& interval(std::uint32_t i) const { return intervals.at(i); }
  std::uint32_t max_interval_size() const;
};

graph_manifest load_manifest(const std::filesystem::path& dir);
void save_manifest(const std::filesystem::path& dir, const graph_manifest& manifest);

std::filesystem::path subshard_path(const std::filesystem::path& dir, std::uint32_t i,
                                    std::uint32_t j, bool transposed = false);
std::filesystem::path interval_path(const std::filesystem::path& dir, std::uint32_t j);
std::filesystem::path hub_path(const std::filesystem::path& dir, std::uint32_t i,
                               std::uint32_t j);

// ---------------------------------------------------------------------------
// Sub-shards
//
// File layout: magic "NXSS", edge_count u64, dst_count u64, then per
// destination record: dst u32, src_count u32, src u32 * src_count.
// Destinations strictly ascending, sources non-decreasing within a record
// (parallel edges are kept).

inline constexpr char subshard_magic[4] = {'N', 'X', 'S', 'S'};
inline constexpr std::uint64_t subshard_header_bytes = 20;

struct sub_shard_block {
  std::uint64_t edge_count = 0;
  std::vector<vertex_id> dsts;                 // one per record, strictly ascending
  std::vector<std::uint32_t> record_offsets;   // dsts.size()+1 prefix sums into srcs
  std::vector<vertex_id> srcs;                 // edge_count entries

  std::uint32_t record_count() const { return static_cast<std::uint32_t>(dsts.size()); }
  std::span<const vertex_id> record_sources(std::uint32_t r) const {
    return {srcs.data() + record_offsets[r], srcs.data() + record_offsets[r + 1]};
  }
  std::uint64_t encoded_bytes() const {
    return subshard_header_bytes + dsts.size() * 8ull + srcs.size() * 4ull;
  }

  /// Builds a block from edges sorted by (dst, src). Throws errc::format on
  /// unsorted input.
  static sub_shard_block from_sorted_edges(std::span<const edge> edges);
};

/// Serializes to the on-disk byte layout (no I/O, no counting).
std::vector<unsigned char> encode_subshard(const sub_shard_block& block);

/// Parses and validates an encoded sub-shard. When ranges are given, every
/// source/destination must fall inside them.
sub_shard_block decode_subshard(std::span<const unsigned char> bytes,
                                const interval_range* src_range = nullptr,
                                const interval_range* dst_range = nullptr);

/// Validates invariants and writes the file. Returns bytes written.
std::uint64_t write_subshard(const std::filesystem::path& path, const sub_shard_block& block);

/// Whole-file read + decode, counted under io_category::sub_shard.
sub_shard_block read_subshard(const std::filesystem::path& path,
                              const interval_range* src_range = nullptr,
                              const interval_range* dst_range = nullptr);

/// Raw bytes of a sub-shard file, counted. Used by the SPU block cache,
/// whose entries stay byte-identical to the files they mirror.
std::vector<unsigned char> read_subshard_raw(const std::filesystem::path& path);

/// Streaming single-pass reader yielding (src, dst) pairs in stored order
/// (destination-major). Validates the format as it goes.
class sub_shard_stream {
 public:
  explicit sub_shard_stream(const std::filesystem::path& path,
                            const interval_range* src_range = nullptr,
                            const interval_range* dst_range = nullptr);

  std::uint64_t edge_count() const { return edge_count_; }
  std::uint64_t dst_count() const { return dst_count_; }

  /// Advances to the next edge; returns false at a clean end of file.
  bool next(edge& out);

 private:
  void start_record();

  counted_reader in_;
  const interval_range* src_range_;
  const interval_range* dst_range_;
  std::uint64_t edge_count_ = 0;
  std::uint64_t dst_count_ = 0;
  std::uint64_t records_seen_ = 0;
  std::uint64_t edges_seen_ = 0;
  vertex_id cur_dst_ = 0;
  vertex_id prev_src_ = 0;
  std::uint32_t remaining_ = 0;
  bool first_record_ = true;
  bool first_src_ = true;
};

// ---------------------------------------------------------------------------
// Intervals
//
// File layout: first_vertex u32, vertex_count u32, attr_width u32, then
// vertex_count * attr_width attribute bytes. File size is exactly
// 12 + count * attr_width.

inline constexpr std::uint64_t interval_header_bytes = 12;

struct interval_data {
  vertex_id first = 0;
  std::uint32_t count = 0;
  std::uint32_t attr_width = 0;
  std::vector<unsigned char> attrs;

  std::uint64_t encoded_bytes() const {
    return interval_header_bytes + std::uint64_t{count} * attr_width;
  }
};

std::uint64_t save_interval(const std::filesystem::path& path, const interval_data& data);

/// Loads and validates. When `expect` is given, first vertex, count and
/// attribute width must match it (errc::geometry otherwise).
interval_data load_interval(const std::filesystem::path& path,
                            const interval_data* expect = nullptr);

// ---------------------------------------------------------------------------
// Hubs
//
// File layout: record_count u64, then per record: dst u32 followed by
// attr_width contribution bytes. Destinations ascending and unique, all
// inside the owning sub-shard's destination interval.

inline constexpr std::uint64_t hub_header_bytes = 8;

struct hub_data {
  std::uint32_t attr_width = 0;
  std::vector<vertex_id> dsts;
  std::vector<unsigned char> contributions;  // dsts.size() * attr_width

  std::uint64_t record_count() const { return dsts.size(); }
  std::uint64_t encoded_bytes() const {
    return hub_header_bytes + dsts.size() * (4ull + attr_width);
  }
};

std::uint64_t write_hub(const std::filesystem::path& path, const hub_data& hub,
                        const interval_range& dst_interval);

hub_data read_hub(const std::filesystem::path& path, std::uint32_t attr_width,
                  const interval_range& dst_interval);

// ---------------------------------------------------------------------------
// Mapping and degree files

struct degree_pair {
  std::uint32_t in = 0;
  std::uint32_t out = 0;
};

/// id_to_raw holds the original index of each dense id, ascending by
/// construction (ids are assigned in raw-index order). Writes map.bin and
/// rmap.bin.
void write_id_maps(const std::filesystem::path& dir, const std::vector<raw_index>& id_to_raw);
std::vector<raw_index> load_reverse_map(const std::filesystem::path& dir, std::uint64_t n);

/// Forward lookup over the (sorted) reverse map.
std::optional<vertex_id> lookup_dense_id(const std::vector<raw_index>& id_to_raw, raw_index raw);

void write_degrees(const std::filesystem::path& dir, const std::vector<degree_pair>& degrees);
std::vector<degree_pair> load_degrees(const std::filesystem::path& dir, std::uint64_t n);

}  // namespace nxcore
