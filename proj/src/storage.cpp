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

#include "nxcore/storage.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "on-disk formats are little-endian and read without byte swapping");

namespace nxcore {
namespace {

template <class T>
void put(std::vector<unsigned char>& buf, T value) {
  const auto size = buf.size();
  buf.resize(size + sizeof(T));
  std::memcpy(buf.data() + size, &value, sizeof(T));
}

template <class T>
T get(std::span<const unsigned char> bytes, std::uint64_t& offset) {
  if (offset + sizeof(T) > bytes.size())
    fail(errc::format, "truncated file: expected " + std::to_string(sizeof(T)) +
                           " bytes at offset " + std::to_string(offset));
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

std::string cell_name(std::uint32_t i, std::uint32_t j) {
  return std::to_string(i) + "_" + std::to_string(j);
}

}  // namespace

// ---------------------------------------------------------------------------
// Counted streams

counted_reader::counted_reader(const std::filesystem::path& path, io_category category)
    : path_(path), in_(path, std::ios::binary), category_(category) {
  if (!in_) fail(errc::storage, "cannot open for reading: " + path.string());
  io_counters::instance().add_open(category);
}

void counted_reader::read_exact(void* dst, std::size_t bytes) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in_.gcount()) != bytes)
    fail(errc::format, "truncated read at offset " + std::to_string(offset_) + " in " +
                           path_.string());
  offset_ += bytes;
  io_counters::instance().add_read(category_, bytes);
}

bool counted_reader::at_end() {
  return in_.peek() == std::ifstream::traits_type::eof();
}

counted_writer::counted_writer(const std::filesystem::path& path, io_category category)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), category_(category) {
  if (!out_) fail(errc::storage, "cannot open for writing: " + path.string());
  io_counters::instance().add_open(category);
}

void counted_writer::write(const void* src, std::size_t bytes) {
  out_.write(static_cast<const char*>(src), static_cast<std::streamsize>(bytes));
  if (!out_) fail(errc::storage, "write failed at offset " + std::to_string(offset_) +
                                     " in " + path_.string());
  offset_ += bytes;
  io_counters::instance().add_written(category_, bytes);
}

void counted_writer::close() {
  out_.close();
  if (!out_) fail(errc::storage, "close failed: " + path_.string());
}

// ---------------------------------------------------------------------------
// Manifest

std::uint32_t graph_manifest::max_interval_size() const {
  std::uint32_t best = 0;
  for (const auto& iv : intervals) best = std::max(best, iv.count);
  return best;
}

graph_manifest load_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) fail(errc::storage, "cannot open manifest: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::format, "manifest is not valid JSON: " + std::string(e.what()));
  }
  io_counters::instance().add_open(io_category::meta);

  graph_manifest man;
  try {
    man.version = doc.at("version").get<std::uint32_t>();
    man.n = doc.at("n").get<std::uint64_t>();
    man.m = doc.at("m").get<std::uint64_t>();
    man.p = doc.at("p").get<std::uint32_t>();
    man.attr_width_default = doc.at("attr_width_default").get<std::uint32_t>();
    man.symmetrized = doc.at("symmetrized").get<bool>();
    man.has_transpose = doc.at("has_transpose").get<bool>();
    std::uint32_t index = 0;
    for (const auto& iv : doc.at("intervals")) {
      man.intervals.push_back({index++, iv.at("first").get<vertex_id>(),
                               iv.at("count").get<std::uint32_t>()});
    }
    man.edge_counts = doc.at("edge_counts").get<std::vector<std::vector<std::uint64_t>>>();
    man.record_counts =
        doc.at("record_counts").get<std::vector<std::vector<std::uint64_t>>>();
    if (man.has_transpose) {
      man.edge_counts_transpose =
          doc.at("edge_counts_transpose").get<std::vector<std::vector<std::uint64_t>>>();
      man.record_counts_transpose =
          doc.at("record_counts_transpose").get<std::vector<std::vector<std::uint64_t>>>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::format, "manifest field error: " + std::string(e.what()));
  }

  if (man.intervals.size() != man.p || man.edge_counts.size() != man.p)
    fail(errc::format, "manifest geometry is inconsistent with P");
  std::uint64_t covered = 0;
  for (const auto& iv : man.intervals) {
    if (iv.first != covered) fail(errc::format, "manifest intervals do not tile [0, n)");
    covered += iv.count;
  }
  if (covered != man.n) fail(errc::format, "manifest intervals do not cover n vertices");
  io_counters::instance().add_read(io_category::meta, std::filesystem::file_size(path));
  return man;
}

void save_manifest(const std::filesystem::path& dir, const graph_manifest& man) {
  nlohmann::json doc;
  doc["format"] = "nxcore-graph";
  doc["version"] = man.version;
  doc["n"] = man.n;
  doc["m"] = man.m;
  doc["p"] = man.p;
  doc["attr_width_default"] = man.attr_width_default;
  doc["id_base"] = 0;
  doc["symmetrized"] = man.symmetrized;
  doc["has_transpose"] = man.has_transpose;
  auto intervals = nlohmann::json::array();
  for (const auto& iv : man.intervals)
    intervals.push_back({{"first", iv.first}, {"count", iv.count}});
  doc["intervals"] = std::move(intervals);
  doc["edge_counts"] = man.edge_counts;
  doc["record_counts"] = man.record_counts;
  if (man.has_transpose) {
    doc["edge_counts_transpose"] = man.edge_counts_transpose;
    doc["record_counts_transpose"] = man.record_counts_transpose;
  }
  doc["files"] = {{"map", "map.bin"},      {"rmap", "rmap.bin"},
                  {"degrees", "deg.bin"},  {"shards", "shards"},
                  {"transpose", "shards_t"}, {"intervals", "intervals"},
                  {"hubs", "hubs"}};

  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(errc::storage, "cannot write manifest: " + path.string());
  const std::string text = doc.dump(2);
  out << text << '\n';
  if (!out) fail(errc::storage, "manifest write failed: " + path.string());
  io_counters::instance().add_open(io_category::meta);
  io_counters::instance().add_written(io_category::meta, text.size() + 1);
}

std::filesystem::path subshard_path(const std::filesystem::path& dir, std::uint32_t i,
                                    std::uint32_t j, bool transposed) {
  return dir / (transposed ? "shards_t" : "shards") / ("ss_" + cell_name(i, j) + ".nxss");
}

std::filesystem::path interval_path(const std::filesystem::path& dir, std::uint32_t j) {
  return dir / "intervals" / ("iv_" + std::to_string(j) + ".nxiv");
}

std::filesystem::path hub_path(const std::filesystem::path& dir, std::uint32_t i,
                               std::uint32_t j) {
  return dir / "hubs" / ("h_" + cell_name(i, j) + ".nxhb");
}

// ---------------------------------------------------------------------------
// Sub-shards

sub_shard_block sub_shard_block::from_sorted_edges(std::span<const edge> edges) {
  sub_shard_block block;
  block.edge_count = edges.size();
  block.srcs.reserve(edges.size());
  block.record_offsets.push_back(0);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (k > 0) {
      const auto& prev = edges[k - 1];
      const auto& cur = edges[k];
      if (cur.dst < prev.dst || (cur.dst == prev.dst && cur.src < prev.src))
        fail(errc::format, "edges are not sorted by (dst, src)");
    }
    if (block.dsts.empty() || block.dsts.back() != edges[k].dst) {
      if (!block.dsts.empty())
        block.record_offsets.push_back(static_cast<std::uint32_t>(block.srcs.size()));
      block.dsts.push_back(edges[k].dst);
    }
    block.srcs.push_back(edges[k].src);
  }
  block.record_offsets.push_back(static_cast<std::uint32_t>(block.srcs.size()));
  if (block.dsts.empty()) block.record_offsets = {0};
  return block;
}

namespace {

void validate_block(const sub_shard_block& block, const interval_range* src_range,
                    const interval_range* dst_range) {
  if (block.record_offsets.size() != block.dsts.size() + 1 ||
      block.record_offsets.front() != 0 ||
      block.record_offsets.back() != block.srcs.size() ||
      block.edge_count != block.srcs.size())
    fail(errc::format, "sub-shard block structure is inconsistent");
  for (std::size_t r = 0; r < block.dsts.size(); ++r) {
    if (r > 0 && block.dsts[r] <= block.dsts[r - 1])
      fail(errc::format, "sub-shard destinations are not strictly ascending");
    if (block.record_offsets[r + 1] <= block.record_offsets[r])
      fail(errc::format, "sub-shard record with no sources");
    if (dst_range && !dst_range->contains(block.dsts[r]))
      fail(errc::format, "destination " + std::to_string(block.dsts[r]) +
                             " outside interval " + std::to_string(dst_range->index));
    for (std::uint32_t k = block.record_offsets[r]; k < block.record_offsets[r + 1]; ++k) {
      if (k > block.record_offsets[r] && block.srcs[k] < block.srcs[k - 1])
        fail(errc::format, "sub-shard sources are not ascending within a record");
      if (src_range && !src_range->contains(block.srcs[k]))
        fail(errc::format, "source " + std::to_string(block.srcs[k]) +
                               " outside interval " + std::to_string(src_range->index));
    }
  }
}

}  // namespace

std::vector<unsigned char> encode_subshard(const sub_shard_block& block) {
  std::vector<unsigned char> buf;
  buf.reserve(block.encoded_bytes());
  buf.insert(buf.end(), subshard_magic, subshard_magic + 4);
  put<std::uint64_t>(buf, block.edge_count);
  put<std::uint64_t>(buf, block.dsts.size());
  for (std::size_t r = 0; r < block.dsts.size(); ++r) {
    put<vertex_id>(buf, block.dsts[r]);
    const std::uint32_t count = block.record_offsets[r + 1] - block.record_offsets[r];
    put<std::uint32_t>(buf, count);
    const auto srcs = block.record_sources(static_cast<std::uint32_t>(r));
    const auto size = buf.size();
    buf.resize(size + srcs.size() * sizeof(vertex_id));
    std::memcpy(buf.data() + size, srcs.data(), srcs.size() * sizeof(vertex_id));
  }
  return buf;
}

sub_shard_block decode_subshard(std::span<const unsigned char> bytes,
                                const interval_range* src_range,
                                const interval_range* dst_range) {
  std::uint64_t off = 0;
  char magic[4];
  if (bytes.size() < subshard_header_bytes)
    fail(errc::format, "sub-shard shorter than its header");
  std::memcpy(magic, bytes.data(), 4);
  off = 4;
  if (std::memcmp(magic, subshard_magic, 4) != 0)
    fail(errc::format, "bad sub-shard magic");
  sub_shard_block block;
  block.edge_count = get<std::uint64_t>(bytes, off);
  const std::uint64_t dst_count = get<std::uint64_t>(bytes, off);

  block.dsts.reserve(dst_count);
  block.srcs.reserve(block.edge_count);
  block.record_offsets.reserve(dst_count + 1);
  block.record_offsets.push_back(0);
  for (std::uint64_t r = 0; r < dst_count; ++r) {
    const vertex_id dst = get<vertex_id>(bytes, off);
    const std::uint32_t count = get<std::uint32_t>(bytes, off);
    if (off + std::uint64_t{count} * 4 > bytes.size())
      fail(errc::format, "sub-shard record overruns the file");
    block.dsts.push_back(dst);
    const auto size = block.srcs.size();
    block.srcs.resize(size + count);
    std::memcpy(block.srcs.data() + size, bytes.data() + off, std::uint64_t{count} * 4);
    off += std::uint64_t{count} * 4;
    block.record_offsets.push_back(static_cast<std::uint32_t>(block.srcs.size()));
  }
  if (off != bytes.size()) fail(errc::format, "trailing bytes after sub-shard records");
  validate_block(block, src_range, dst_range);
  return block;
}

std::uint64_t write_subshard(const std::filesystem::path& path, const sub_shard_block& block) {
  validate_block(block, nullptr, nullptr);
  const auto bytes = encode_subshard(block);
  counted_writer out(path, io_category::sub_shard);
  out.write(bytes.data(), bytes.size());
  out.close();
  return bytes.size();
}

sub_shard_block read_subshard(const std::filesystem::path& path,
                              const interval_range* src_range,
                              const interval_range* dst_range) {
  return decode_subshard(read_subshard_raw(path), src_range, dst_range);
}

std::vector<unsigned char> read_subshard_raw(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) fail(errc::storage, "cannot stat sub-shard: " + path.string());
  counted_reader in(path, io_category::sub_shard);
  std::vector<unsigned char> bytes(size);
  if (size > 0) in.read_exact(bytes.data(), bytes.size());
  return bytes;
}

sub_shard_stream::sub_shard_stream(const std::filesystem::path& path,
                                   const interval_range* src_range,
                                   const interval_range* dst_range)
    : in_(path, io_category::sub_shard), src_range_(src_range), dst_range_(dst_range) {
  char magic[4];
  in_.read_exact(magic, 4);
  if (std::memcmp(magic, subshard_magic, 4) != 0)
    fail(errc::format, "bad sub-shard magic in " + path.string());
  in_.read_exact(&edge_count_, 8);
  in_.read_exact(&dst_count_, 8);
}

void sub_shard_stream::start_record() {
  vertex_id dst;
  std::uint32_t count;
  in_.read_exact(&dst, 4);
  in_.read_exact(&count, 4);
  if (count == 0) fail(errc::format, "sub-shard record with no sources");
  if (!first_record_ && dst <= cur_dst_)
    fail(errc::format, "sub-shard destinations are not strictly ascending");
  if (dst_range_ && !dst_range_->contains(dst))
    fail(errc::format, "destination outside its interval");
  cur_dst_ = dst;
  remaining_ = count;
  first_record_ = false;
  first_src_ = true;
  ++records_seen_;
}

bool sub_shard_stream::next(edge& out) {
  if (remaining_ == 0) {
    if (records_seen_ == dst_count_) {
      if (edges_seen_ != edge_count_)
        fail(errc::format, "sub-shard edge count does not match its records");
      if (!in_.at_end()) fail(errc::format, "trailing bytes after sub-shard records");
      return false;
    }
    start_record();
  }
  vertex_id src;
  in_.read_exact(&src, 4);
  if (!first_src_ && src < prev_src_)
    fail(errc::format, "sub-shard sources are not ascending within a record");
  if (src_range_ && !src_range_->contains(src))
    fail(errc::format, "source outside its interval");
  prev_src_ = src;
  first_src_ = false;
  --remaining_;
  ++edges_seen_;
  if (edges_seen_ > edge_count_) fail(errc::format, "more edges than the header claims");
  out = {src, cur_dst_};
  return true;
}

// ---------------------------------------------------------------------------
// Intervals

std::uint64_t save_interval(const std::filesystem::path& path, const interval_data& data) {
  if (data.count == 0) fail(errc::format, "refusing to write an empty interval");
  if (data.attrs.size() != std::uint64_t{data.count} * data.attr_width)
    fail(errc::format, "interval attribute byte count mismatch");
  counted_writer out(path, io_category::interval);
  out.write(&data.first, 4);
  out.write(&data.count, 4);
  out.write(&data.attr_width, 4);
  out.write(data.attrs.data(), data.attrs.size());
  out.close();
  return interval_header_bytes + data.attrs.size();
}

interval_data load_interval(const std::filesystem::path& path, const interval_data* expect) {
  counted_reader in(path, io_category::interval);
  interval_data data;
  in.read_exact(&data.first, 4);
  in.read_exact(&data.count, 4);
  in.read_exact(&data.attr_width, 4);
  if (data.count == 0 || data.attr_width == 0)
    fail(errc::format, "interval header has zero geometry: " + path.string());
  if (expect && (data.first != expect->first || data.count != expect->count ||
                 data.attr_width != expect->attr_width))
    fail(errc::geometry, "interval file does not match the manifest: " + path.string());
  data.attrs.resize(std::uint64_t{data.count} * data.attr_width);
  in.read_exact(data.attrs.data(), data.attrs.size());
  if (!in.at_end()) fail(errc::format, "trailing bytes after interval attributes");
  return data;
}

// ---------------------------------------------------------------------------
// Hubs

std::uint64_t write_hub(const std::filesystem::path& path, const hub_data& hub,
                        const interval_range& dst_interval) {
  if (hub.contributions.size() != hub.dsts.size() * std::uint64_t{hub.attr_width})
    fail(errc::format, "hub contribution byte count mismatch");
  for (std::size_t k = 0; k < hub.dsts.size(); ++k) {
    if (k > 0 && hub.dsts[k] <= hub.dsts[k - 1])
      fail(errc::format, "hub destinations are not strictly ascending");
    if (!dst_interval.contains(hub.dsts[k]))
      fail(errc::format, "hub destination " + std::to_string(hub.dsts[k]) +
                             " outside interval " + std::to_string(dst_interval.index));
  }
  counted_writer out(path, io_category::hub);
  const std::uint64_t count = hub.dsts.size();
  out.write(&count, 8);
  for (std::size_t k = 0; k < hub.dsts.size(); ++k) {
    out.write(&hub.dsts[k], 4);
    out.write(hub.contributions.data() + k * hub.attr_width, hub.attr_width);
  }
  out.close();
  return hub.encoded_bytes();
}

hub_data read_hub(const std::filesystem::path& path, std::uint32_t attr_width,
                  const interval_range& dst_interval) {
  counted_reader in(path, io_category::hub);
  hub_data hub;
  hub.attr_width = attr_width;
  std::uint64_t count = 0;
  in.read_exact(&count, 8);
  hub.dsts.resize(count);
  hub.contributions.resize(count * attr_width);
  for (std::uint64_t k = 0; k < count; ++k) {
    in.read_exact(&hub.dsts[k], 4);
    in.read_exact(hub.contributions.data() + k * attr_width, attr_width);
    if (k > 0 && hub.dsts[k] <= hub.dsts[k - 1])
      fail(errc::format, "hub destinations are not strictly ascending");
    if (!dst_interval.contains(hub.dsts[k]))
      fail(errc::format, "hub destination outside its interval");
  }
  if (!in.at_end()) fail(errc::format, "trailing bytes after hub records");
  return hub;
}

// ---------------------------------------------------------------------------
// Mapping and degree files

void write_id_maps(const std::filesystem::path& dir, const std::vector<raw_index>& id_to_raw) {
  {
    counted_writer map(dir / "map.bin", io_category::meta);
    for (std::size_t id = 0; id < id_to_raw.size(); ++id) {
      map.write(&id_to_raw[id], 8);
      const auto dense = static_cast<vertex_id>(id);
      map.write(&dense, 4);
    }
    map.close();
  }
  counted_writer rmap(dir / "rmap.bin", io_category::meta);
  rmap.write(id_to_raw.data(), id_to_raw.size() * 8);
  rmap.close();
}

std::vector<raw_index> load_reverse_map(const std::filesystem::path& dir, std::uint64_t n) {
  counted_reader in(dir / "rmap.bin", io_category::meta);
  std::vector<raw_index> id_to_raw(n);
  in.read_exact(id_to_raw.data(), n * 8);
  if (!in.at_end()) fail(errc::format, "trailing bytes in rmap.bin");
  return id_to_raw;
}

std::optional<vertex_id> lookup_dense_id(const std::vector<raw_index>& id_to_raw,
                                         raw_index raw) {
  const auto it = std::lower_bound(id_to_raw.begin(), id_to_raw.end(), raw);
  if (it == id_to_raw.end() || *it != raw) return std::nullopt;
  return static_cast<vertex_id>(it - id_to_raw.begin());
}

void write_degrees(const std::filesystem::path& dir, const std::vector<degree_pair>& degrees) {
  counted_writer out(dir / "deg.bin", io_category::meta);
  out.write(degrees.data(), degrees.size() * sizeof(degree_pair));
  out.close();
}

std::vector<degree_pair> load_degrees(const std::filesystem::path& dir, std::uint64_t n) {
  counted_reader in(dir / "deg.bin", io_category::meta);
  std::vector<degree_pair> degrees(n);
  in.read_exact(degrees.data(), n * sizeof(degree_pair));
  if (!in.at_end()) fail(errc::format, "trailing bytes in deg.bin");
  return degrees;
}

}  // namespace nxcore
