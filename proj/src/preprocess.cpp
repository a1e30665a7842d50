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

#include "nxcore/preprocess.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <cstring>

#include "nxcore/graph_model.hpp"

namespace nxcore {

// ---------------------------------------------------------------------------
// Text parsing

text_edge_source::text_edge_source(const std::filesystem::path& path) : path_(path) {
  reset();
}

void text_edge_source::reset() {
  in_ = std::ifstream(path_);
  if (!in_) fail(errc::storage, "cannot open edge list: " + path_.string());
  line_no_ = 0;
}

namespace {

const char* skip_ws(const char* p, const char* end) {
  while (p != end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
  return p;
}

}  // namespace

bool text_edge_source::next(raw_index& src, raw_index& dst) {
  while (std::getline(in_, line_)) {
    ++line_no_;
    const char* p = line_.data();
    const char* end = p + line_.size();
    p = skip_ws(p, end);
    if (p == end || *p == '#' || *p == '%') continue;

    const auto parse_one = [&](raw_index& out) {
      auto [next, ec] = std::from_chars(p, end, out);
      if (ec != std::errc{} || next == p)
        fail(errc::parse_error,
             "parse error at line " + std::to_string(line_no_) + " of " + path_.string());
      p = next;
    };
    parse_one(src);
    const char* after_src = p;
    p = skip_ws(p, end);
    if (p == after_src)
      fail(errc::parse_error,
           "parse error at line " + std::to_string(line_no_) + " of " + path_.string());
    parse_one(dst);
    p = skip_ws(p, end);
    if (p != end)
      fail(errc::parse_error, "trailing characters at line " + std::to_string(line_no_) +
                                  " of " + path_.string());
    return true;
  }
  if (in_.bad()) fail(errc::storage, "read failure on " + path_.string());
  return false;
}

// ---------------------------------------------------------------------------
// Degreeing

id_map degree(edge_source& source, bool symmetrize) {
  std::unordered_map<raw_index, degree_pair> seen;
  std::uint64_t input_edges = 0;
  raw_index s = 0, d = 0;
  source.reset();
  while (source.next(s, d)) {
    ++input_edges;
    ++seen[s].out;
    ++seen[d].in;
    if (symmetrize) {
      ++seen[d].out;
      ++seen[s].in;
    }
  }
  if (input_edges == 0) fail(errc::empty_graph, "empty-graph: edge list yields no edges");

  id_map map;
  map.edge_count = symmetrize ? input_edges * 2 : input_edges;
  map.id_to_raw.reserve(seen.size());
  for (const auto& [raw, _] : seen) map.id_to_raw.push_back(raw);
  std::sort(map.id_to_raw.begin(), map.id_to_raw.end());
  if (map.id_to_raw.size() > 0xFFFFFFFFull)
    fail(errc::oversize, "more than 2^32-1 vertices are not supported");

  map.degrees.resize(map.id_to_raw.size());
  for (std::size_t id = 0; id < map.id_to_raw.size(); ++id)
    map.degrees[id] = seen.at(map.id_to_raw[id]);
  return map;
}

// ---------------------------------------------------------------------------
// Sharding

namespace {

std::filesystem::path spill_path(const std::filesystem::path& tmp, std::uint32_t i,
                                 std::uint32_t j) {
  return tmp / ("spill_" + std::to_string(i) + "_" + std::to_string(j) + ".bin");
}

/// Buffered append-only buckets, one per grid cell. Flushing opens the spill
/// file, appends and closes, so at most one descriptor is held at a time.
class spill_buckets {
 public:
  spill_buckets(const std::filesystem::path& tmp, std::uint32_t p)
      : tmp_(tmp), p_(p), buffers_(std::size_t{p} * p) {
    // ~32 MiB of total buffering shared across the grid.
    per_cell_ = std::max<std::size_t>(1024, (32ull << 20) / (sizeof(edge) * p * p));
  }

  void add(std::uint32_t i, std::uint32_t j, edge e) {
    auto& buf = buffers_[std::size_t{i} * p_ + j];
    buf.push_back(e);
    if (buf.size() >= per_cell_) flush(i, j);
  }

  void flush_all() {
    for (std::uint32_t i = 0; i < p_; ++i)
      for (std::uint32_t j = 0; j < p_; ++j) flush(i, j);
  }

 private:
  void flush(std::uint32_t i, std::uint32_t j) {
    auto& buf = buffers_[std::size_t{i} * p_ + j];
    if (buf.empty()) return;
    const auto path = spill_path(tmp_, i, j);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) fail(errc::storage, "cannot open spill file: " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(edge)));
    if (!out) fail(errc::storage, "spill write failed: " + path.string());
    buf.clear();
  }

  std::filesystem::path tmp_;
  std::uint32_t p_;
  std::size_t per_cell_;
  std::vector<std::vector<edge>> buffers_;
};

std::vector<edge> read_spill(const std::filesystem::path& path) {
  std::vector<edge> edges;
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) return edges;  // cell never got an edge
  if (size % sizeof(edge) != 0) fail(errc::storage, "corrupt spill file: " + path.string());
  edges.resize(size / sizeof(edge));
  std::ifstream in(path, std::ios::binary);
  in.read(reinterpret_cast<char*>(edges.data()), static_cast<std::streamsize>(size));
  if (static_cast<std::uint64_t>(in.gcount()) != size)
    fail(errc::storage, "short read on spill file: " + path.string());
  return edges;
}

std::filesystem::path pick_tmp_dir(const preprocess_options& options,
                                   const std::filesystem::path& out_dir) {
  if (!options.tmp_dir.empty()) return options.tmp_dir;
  if (const char* env = std::getenv("NXCORE_TMPDIR")) return std::filesystem::path(env);
  return out_dir / ".spill";
}

}  // namespace

graph_manifest preprocess_graph(edge_source& source, const std::filesystem::path& out_dir,
                                const preprocess_options& options) {
  id_map map = degree(source, options.symmetrize);
  const std::uint64_t n = map.vertex_count();
  const std::uint32_t p = options.partitions;
  if (p == 0 || p > n)
    fail(errc::invalid_partition,
         "invalid partition: P=" + std::to_string(p) + " for n=" + std::to_string(n));

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "shards", ec);
  if (ec) fail(errc::storage, "cannot create " + (out_dir / "shards").string());
  const auto tmp = pick_tmp_dir(options, out_dir);
  std::filesystem::create_directories(tmp, ec);
  if (ec) fail(errc::storage, "cannot create spill dir " + tmp.string());

  // Forward lookup for the substitution pass.
  std::unordered_map<raw_index, vertex_id> raw_to_id;
  raw_to_id.reserve(map.id_to_raw.size());
  for (std::size_t id = 0; id < map.id_to_raw.size(); ++id)
    raw_to_id.emplace(map.id_to_raw[id], static_cast<vertex_id>(id));

  // Bucket pass: substitute ids and spill each edge into its grid cell.
  {
    spill_buckets buckets(tmp, p);
    raw_index s = 0, d = 0;
    source.reset();
    while (source.next(s, d)) {
      const edge e{raw_to_id.at(s), raw_to_id.at(d)};
      buckets.add(locate_interval(e.src, n, p), locate_interval(e.dst, n, p), e);
      if (options.symmetrize) {
        const edge r{e.dst, e.src};
        buckets.add(locate_interval(r.src, n, p), locate_interval(r.dst, n, p), r);
      }
    }
    buckets.flush_all();
  }

  // Sort-and-encode pass, one cell per worker. Working memory per worker is
  // bounded by one sub-shard.
  std::vector<std::vector<std::uint64_t>> edge_counts(p, std::vector<std::uint64_t>(p, 0));
  std::vector<std::vector<std::uint64_t>> record_counts(p, std::vector<std::uint64_t>(p, 0));
  std::string first_error;
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (std::uint32_t i = 0; i < p; ++i) {
    for (std::uint32_t j = 0; j < p; ++j) {
      try {
        auto edges = read_spill(spill_path(tmp, i, j));
        std::sort(edges.begin(), edges.end(), [](const edge& a, const edge& b) {
          return a.dst < b.dst || (a.dst == b.dst && a.src < b.src);
        });
        const auto block = sub_shard_block::from_sorted_edges(edges);
        write_subshard(subshard_path(out_dir, i, j), block);
        edge_counts[i][j] = edges.size();
        record_counts[i][j] = block.record_count();
        std::filesystem::remove(spill_path(tmp, i, j));
      } catch (const std::exception& e) {
#pragma omp critical
        if (first_error.empty()) first_error = e.what();
      }
    }
  }
  if (!first_error.empty()) fail(errc::storage, first_error);
  std::filesystem::remove(tmp, ec);  // succeeds only when empty; best effort

  write_id_maps(out_dir, map.id_to_raw);
  write_degrees(out_dir, map.degrees);

  graph_manifest man;
  man.n = n;
  man.m = map.edge_count;
  man.p = p;
  man.symmetrized = options.symmetrize;
  man.intervals = partition_vertices(n, p);
  man.edge_counts = std::move(edge_counts);
  man.record_counts = std::move(record_counts);
  save_manifest(out_dir, man);

  if (options.build_transpose) man = build_transpose(out_dir);
  return man;
}

graph_manifest build_transpose(const std::filesystem::path& dir) {
  graph_manifest man = load_manifest(dir);
  std::error_code ec;
  std::filesystem::create_directories(dir / "shards_t", ec);
  if (ec) fail(errc::storage, "cannot create " + (dir / "shards_t").string());

  const std::uint32_t p = man.p;
  std::vector<std::vector<std::uint64_t>> record_counts(p, std::vector<std::uint64_t>(p, 0));
  std::string first_error;
  // Transpose cell (i, j) is cell (j, i) with every edge reversed, re-sorted
  // to the destination-major order.
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (std::uint32_t i = 0; i < p; ++i) {
    for (std::uint32_t j = 0; j < p; ++j) {
      try {
        const auto& src_iv = man.interval(j);
        const auto& dst_iv = man.interval(i);
        const auto block = read_subshard(subshard_path(dir, j, i), &src_iv, &dst_iv);
        std::vector<edge> reversed;
        reversed.reserve(block.edge_count);
        for (std::uint32_t r = 0; r < block.record_count(); ++r)
          for (const vertex_id s : block.record_sources(r))
            reversed.push_back({block.dsts[r], s});
        std::sort(reversed.begin(), reversed.end(), [](const edge& a, const edge& b) {
          return a.dst < b.dst || (a.dst == b.dst && a.src < b.src);
        });
        const auto t_block = sub_shard_block::from_sorted_edges(reversed);
        write_subshard(subshard_path(dir, i, j, /*transposed=*/true), t_block);
        record_counts[i][j] = t_block.record_count();
      } catch (const std::exception& e) {
#pragma omp critical
        if (first_error.empty()) first_error = e.what();
      }
    }
  }
  if (!first_error.empty()) fail(errc::storage, first_error);

  man.has_transpose = true;
  man.edge_counts_transpose.assign(p, std::vector<std::uint64_t>(p, 0));
  for (std::uint32_t i = 0; i < p; ++i)
    for (std::uint32_t j = 0; j < p; ++j)
      man.edge_counts_transpose[i][j] = man.edge_counts[j][i];
  man.record_counts_transpose = std::move(record_counts);
  save_manifest(dir, man);
  return man;
}

std::vector<edge> decode_all_edges(const std::filesystem::path& dir,
                                   const graph_manifest& man, bool transposed) {
  std::vector<edge> edges;
  edges.reserve(man.m);
  for (std::uint32_t i = 0; i < man.p; ++i) {
    for (std::uint32_t j = 0; j < man.p; ++j) {
      const auto& src_iv = man.interval(i);
      const auto& dst_iv = man.interval(j);
      sub_shard_stream stream(subshard_path(dir, i, j, transposed), &src_iv, &dst_iv);
      edge e;
      while (stream.next(e)) edges.push_back(e);
    }
  }
  return edges;
}

}  // namespace nxcore
