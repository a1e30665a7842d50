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

#include <omp.h>

#include <atomic>
#include <chrono>
#include <concepts>
#include <condition_variable>
#include <cstring>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "nxcore/common.hpp"
#include "nxcore/graph_model.hpp"
#include "nxcore/io_counters.hpp"
#include "nxcore/storage.hpp"

namespace nxcore {

// ---------------------------------------------------------------------------
// Strategy plans

enum class update_strategy { spu, dpu, mpu };
enum class sync_mode { callback, lock };

const char* strategy_name(update_strategy kind);

struct strategy_plan {
  update_strategy kind = update_strategy::spu;
  std::uint32_t resident = 0;  ///< Q; equals P for SPU, 0 for DPU
  sync_mode sync = sync_mode::callback;
  std::uint64_t cache_budget = 0;  ///< leftover SPU budget for sub-shard caching
};

/// Streaming working set the planner charges on top of interval buffers.
inline constexpr std::uint64_t stream_reserve_bytes = 64 * 1024;

/// Picks the update strategy for a memory budget: SPU once two full copies
/// of every interval fit (leftover budget caches sub-shards), otherwise
/// MPU with Q = floor(B_M / (2 n B_a) * P), which is DPU at Q = 0.
strategy_plan select_strategy(const graph_manifest& manifest,
                              std::uint64_t memory_budget_bytes,
                              std::uint32_t attr_width);

// ---------------------------------------------------------------------------
// Fine-grained work model

/// A contiguous destination-record range of one sub-shard. Units of a
/// sub-shard never share a destination, so they can run concurrently
/// without locks on the attribute array.
struct work_unit {
  std::uint32_t rec_begin = 0;
  std::uint32_t rec_end = 0;
};

/// Splits a decoded sub-shard into up to `target_units` destination ranges
/// balanced by edge count. A destination never straddles two units.
std::vector<work_unit> partition_work(const sub_shard_block& block,
                                      std::uint32_t target_units);

// ---------------------------------------------------------------------------
// Stats and tracing

struct iteration_stats {
  std::uint32_t iteration = 0;
  update_strategy strategy = update_strategy::spu;
  std::uint32_t active_intervals = 0;  ///< active going into the iteration
  std::uint64_t changed_vertices = 0;  ///< produced by the iteration
  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  double wall_ms = 0;
};

std::string format_stats_line(const iteration_stats& stats);

enum class visit_phase { direct, to_hub, from_hub };

struct visit_event {
  sub_shard_id cell;
  visit_phase phase = visit_phase::direct;

  friend bool operator==(const visit_event&, const visit_event&) = default;
};

// ---------------------------------------------------------------------------
// Kernel contract
//
// Kernels are pure value transformers; all mutable state lives in the
// engine. gather() returns false for a no-contribution source (e.g. an
// unreached BFS vertex), combine() must be associative and commutative,
// and the engine fixes the apply order (ascending source interval, then
// ascending source id) so floating-point kernels reproduce bitwise.

template <class K>
concept graph_kernel = requires(const K k, typename K::attr_t a, vertex_id v,
                                std::uint32_t deg, typename K::attr_t& out) {
  typename K::attr_t;
  { k.init(v) } -> std::same_as<typename K::attr_t>;
  { k.initially_active(v) } -> std::same_as<bool>;
  { k.iteration_init(a) } -> std::same_as<typename K::attr_t>;
  { k.gather(v, a, deg, out) } -> std::same_as<bool>;
  { k.combine(a, a) } -> std::same_as<typename K::attr_t>;
  { k.apply(v, a, a) } -> std::same_as<typename K::attr_t>;
  { k.changed(a, a) } -> std::same_as<bool>;
  { K::copy_forward } -> std::convertible_to<bool>;
  { K::skip_inactive_rows } -> std::convertible_to<bool>;
  { K::needs_out_degrees } -> std::convertible_to<bool>;
  { k.exact_change_needs_prev() } -> std::same_as<bool>;
};

struct run_options {
  strategy_plan plan;
  std::uint32_t max_iterations = 0xFFFFFFFFu;
  std::uint32_t threads = 1;
  bool use_transpose = false;
  /// Claim/release destination tags while units run; aborts on any overlap.
  bool ownership_checks = false;
  /// When set, the engine appends one event per sub-shard schedule step
  /// (callback mode and serial reference only).
  std::vector<visit_event>* visit_log = nullptr;
  std::function<void(const iteration_stats&)> on_iteration;
};

template <class A>
struct run_result {
  std::vector<A> attributes;  ///< final per-vertex values, by dense id
  std::vector<iteration_stats> stats;
  std::uint32_t iterations = 0;
  std::vector<std::uint8_t> active;  ///< per-interval activity at exit
};

// ---------------------------------------------------------------------------
// Typed storage helpers

template <class A>
std::vector<A> load_attrs(const std::filesystem::path& path, const interval_range& iv) {
  interval_data expect{iv.first, iv.count, sizeof(A), {}};
  const interval_data data = load_interval(path, &expect);
  std::vector<A> out(iv.count);
  std::memcpy(out.data(), data.attrs.data(), data.attrs.size());
  return out;
}

template <class A>
void save_attrs(const std::filesystem::path& path, const interval_range& iv,
                const std::vector<A>& attrs) {
  interval_data data{iv.first, iv.count, sizeof(A), {}};
  data.attrs.resize(attrs.size() * sizeof(A));
  std::memcpy(data.attrs.data(), attrs.data(), data.attrs.size());
  save_interval(path, data);
}

template <class A>
struct typed_hub {
  std::vector<vertex_id> dsts;
  std::vector<A> values;
};

template <class A>
void save_typed_hub(const std::filesystem::path& path, const typed_hub<A>& hub,
                    const interval_range& dst_interval) {
  hub_data data;
  data.attr_width = sizeof(A);
  data.dsts = hub.dsts;
  data.contributions.resize(hub.values.size() * sizeof(A));
  std::memcpy(data.contributions.data(), hub.values.data(), data.contributions.size());
  write_hub(path, data, dst_interval);
}

template <class A>
typed_hub<A> load_typed_hub(const std::filesystem::path& path,
                            const interval_range& dst_interval) {
  const hub_data data = read_hub(path, sizeof(A), dst_interval);
  typed_hub<A> hub;
  hub.dsts = data.dsts;
  hub.values.resize(data.dsts.size());
  std::memcpy(hub.values.data(), data.contributions.data(), data.contributions.size());
  return hub;
}

// ---------------------------------------------------------------------------
// The iteration driver.
//
// All three schedules are one parameterized traversal: Q resident intervals
// kept as in-memory ping-pong pairs, the rest on disk behind hubs. Q = P is
// the single-phase schedule, Q = 0 the double-phase one; the traversal and
// per-destination apply order are identical in all cases, which is what
// makes the strategies bit-for-bit equivalent.

template <graph_kernel K>
class runner {
 public:
  using attr_t = typename K::attr_t;

  runner(std::filesystem::path dir, graph_manifest manifest, K kernel, run_options options)
      : dir_(std::move(dir)),
        man_(std::move(manifest)),
        kernel_(std::move(kernel)),
        opt_(std::move(options)) {
    static_assert(K::copy_forward || !K::skip_inactive_rows,
                  "row skipping is only sound for copy-forward kernels");
    p_ = man_.p;
    switch (opt_.plan.kind) {
      case update_strategy::spu: q_ = p_; break;
      case update_strategy::dpu: q_ = 0; break;
      case update_strategy::mpu: q_ = opt_.plan.resident; break;
    }
    if (q_ > p_) fail(errc::config, "resident interval count exceeds P");
    if (opt_.use_transpose && !man_.has_transpose)
      fail(errc::config, "graph has no transpose shard grid");
    if (opt_.threads == 0) opt_.threads = 1;
    counts_ = opt_.use_transpose ? &man_.edge_counts_transpose : &man_.edge_counts;
    if (K::needs_out_degrees) {
      const auto degrees = load_degrees(dir_, man_.n);
      out_degrees_.resize(man_.n);
      for (std::size_t v = 0; v < degrees.size(); ++v)
        out_degrees_[v] = opt_.use_transpose ? degrees[v].in : degrees[v].out;
    }
  }

  run_result<attr_t> run() {
    bootstrap();
    run_result<attr_t> result;
    std::uint32_t iter = 0;
    while (iter < opt_.max_iterations && any_active()) {
      ++iter;
      iteration_stats stats = run_iteration(iter);
      result.stats.push_back(stats);
      if (opt_.on_iteration) opt_.on_iteration(stats);
    }
    result.iterations = iter;
    result.active = active_;
    collect(result.attributes);
    return result;
  }

  const std::vector<std::uint8_t>& active_intervals() const { return active_; }

 private:
  // --- topology helpers

  std::uint64_t cell_edges(std::uint32_t i, std::uint32_t j) const {
    return (*counts_)[i][j];
  }

  std::uint32_t out_degree(vertex_id v) const {
    return K::needs_out_degrees ? out_degrees_[v] : 0;
  }

  void log_visit(sub_shard_id cell, visit_phase phase) {
    if (opt_.visit_log) opt_.visit_log->push_back({cell, phase});
  }

  sub_shard_block decode_cell(std::uint32_t i, std::uint32_t j) {
    const auto path = subshard_path(dir_, i, j, opt_.use_transpose);
    const auto& src_iv = man_.interval(i);
    const auto& dst_iv = man_.interval(j);
    if (opt_.plan.cache_budget > 0) {
      const std::uint64_t key = std::uint64_t{i} * p_ + j;
      std::unique_lock lock(cache_mu_);
      if (const auto it = cache_.find(key); it != cache_.end())
        return decode_subshard(it->second, &src_iv, &dst_iv);
      lock.unlock();
      auto bytes = read_subshard_raw(path);
      auto block = decode_subshard(bytes, &src_iv, &dst_iv);
      lock.lock();
      if (cache_used_ + bytes.size() <= opt_.plan.cache_budget &&
          !cache_.contains(key)) {
        cache_used_ += bytes.size();
        cache_.emplace(key, std::move(bytes));
      }
      return block;
    }
    return read_subshard(path, &src_iv, &dst_iv);
  }

  // --- bootstrap / teardown

  void bootstrap() {
    active_.assign(p_, 0);
    for (std::uint32_t i = 0; i < p_; ++i) {
      const auto& iv = man_.interval(i);
      for (vertex_id v = iv.first; v < iv.end(); ++v)
        if (kernel_.initially_active(v)) {
          active_[i] = 1;
          break;
        }
    }

    prev_resident_.assign(q_, {});
    cur_resident_.assign(q_, {});
    for (std::uint32_t j = 0; j < q_; ++j) {
      const auto& iv = man_.interval(j);
      prev_resident_[j].resize(iv.count);
      cur_resident_[j].resize(iv.count);
      for (vertex_id v = iv.first; v < iv.end(); ++v)
        prev_resident_[j][v - iv.first] = kernel_.init(v);
    }

    if (q_ < p_) {
      std::error_code ec;
      std::filesystem::create_directories(dir_ / "intervals", ec);
      std::filesystem::remove_all(dir_ / "hubs", ec);
      std::filesystem::create_directories(dir_ / "hubs", ec);
      for (std::uint32_t j = q_; j < p_; ++j) {
        const auto& iv = man_.interval(j);
        std::vector<attr_t> attrs(iv.count);
        for (vertex_id v = iv.first; v < iv.end(); ++v)
          attrs[v - iv.first] = kernel_.init(v);
        save_attrs(interval_path(dir_, j), iv, attrs);
      }
    }
    init_moved_.assign(p_, {});
  }

  void collect(std::vector<attr_t>& out) {
    out.resize(man_.n);
    for (std::uint32_t j = 0; j < p_; ++j) {
      const auto& iv = man_.interval(j);
      if (j < q_) {
        std::copy(prev_resident_[j].begin(), prev_resident_[j].end(),
                  out.begin() + iv.first);
      } else {
        const auto attrs = load_attrs<attr_t>(interval_path(dir_, j), iv);
        std::copy(attrs.begin(), attrs.end(), out.begin() + iv.first);
      }
    }
  }

  bool any_active() const {
    for (const auto flag : active_)
      if (flag) return true;
    return false;
  }

  // --- per-record update core

  /// Folds one destination record's sources in ascending-id order.
  bool fold_record(const sub_shard_block& block, std::uint32_t r,
                   const std::vector<attr_t>& src_attrs, vertex_id src_first,
                   attr_t& acc) const {
    bool have = false;
    for (const vertex_id s : block.record_sources(r)) {
      attr_t c;
      if (!kernel_.gather(s, src_attrs[s - src_first], out_degree(s), c)) continue;
      acc = have ? kernel_.combine(acc, c) : c;
      have = true;
    }
    return have;
  }

  void run_units_direct(const sub_shard_block& block, const interval_range& src_iv,
                        const std::vector<attr_t>& src_attrs, const interval_range& dst_iv,
                        std::vector<attr_t>& cur, std::vector<std::uint8_t>* received,
                        bool parallel) {
    const auto units =
        partition_work(block, parallel ? opt_.threads * 4 : 1);
    std::vector<std::atomic<std::uint32_t>>* tags = nullptr;
    std::vector<std::atomic<std::uint32_t>> tag_store;
    if (opt_.ownership_checks) {
      tag_store = std::vector<std::atomic<std::uint32_t>>(dst_iv.count);
      tags = &tag_store;
    }
#pragma omp parallel for schedule(dynamic, 1) num_threads(opt_.threads) if (parallel)
    for (std::size_t u = 0; u < units.size(); ++u) {
      const auto [rb, re] = units[u];
      if (tags) claim_range(*tags, block, rb, re, dst_iv.first, static_cast<std::uint32_t>(u) + 1);
      for (std::uint32_t r = rb; r < re; ++r) {
        attr_t acc{};
        if (!fold_record(block, r, src_attrs, src_iv.first, acc)) continue;
        const vertex_id dst = block.dsts[r];
        cur[dst - dst_iv.first] = kernel_.apply(dst, cur[dst - dst_iv.first], acc);
        if (received) (*received)[dst - dst_iv.first] = 1;
      }
      if (tags) release_range(*tags, block, rb, re, dst_iv.first);
    }
  }

  static void claim_range(std::vector<std::atomic<std::uint32_t>>& tags,
                          const sub_shard_block& block, std::uint32_t rb, std::uint32_t re,
                          vertex_id first, std::uint32_t tag) {
    for (std::uint32_t r = rb; r < re; ++r) {
      std::uint32_t expected = 0;
      if (!tags[block.dsts[r] - first].compare_exchange_strong(expected, tag))
        fail(errc::internal, "two work units claimed one destination vertex");
    }
  }

  static void release_range(std::vector<std::atomic<std::uint32_t>>& tags,
                            const sub_shard_block& block, std::uint32_t rb,
                            std::uint32_t re, vertex_id first) {
    for (std::uint32_t r = rb; r < re; ++r)
      tags[block.dsts[r] - first].store(0);
  }

  typed_hub<attr_t> build_hub(const sub_shard_block& block, const interval_range& src_iv,
                              const std::vector<attr_t>& src_attrs, bool parallel) {
    const std::uint32_t records = block.record_count();
    std::vector<attr_t> slot(records);
    std::vector<std::uint8_t> has(records, 0);
    const auto units = partition_work(block, parallel ? opt_.threads * 4 : 1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(opt_.threads) if (parallel)
    for (std::size_t u = 0; u < units.size(); ++u) {
      for (std::uint32_t r = units[u].rec_begin; r < units[u].rec_end; ++r) {
        attr_t acc{};
        if (fold_record(block, r, src_attrs, src_iv.first, acc)) {
          slot[r] = acc;
          has[r] = 1;
        }
      }
    }
    typed_hub<attr_t> hub;
    for (std::uint32_t r = 0; r < records; ++r) {
      if (!has[r]) continue;
      hub.dsts.push_back(block.dsts[r]);
      hub.values.push_back(slot[r]);
    }
    return hub;
  }

  void apply_hub(const typed_hub<attr_t>& hub, const interval_range& dst_iv,
                 std::vector<attr_t>& cur, std::vector<std::uint8_t>* received,
                 bool parallel) {
    const std::int64_t records = static_cast<std::int64_t>(hub.dsts.size());
#pragma omp parallel for schedule(static) num_threads(opt_.threads) if (parallel)
    for (std::int64_t k = 0; k < records; ++k) {
      const vertex_id dst = hub.dsts[k];
      cur[dst - dst_iv.first] = kernel_.apply(dst, cur[dst - dst_iv.first], hub.values[k]);
      if (received) (*received)[dst - dst_iv.first] = 1;
    }
  }

  // --- the iteration

  iteration_stats run_iteration(std::uint32_t iter) {
    const auto t0 = std::chrono::steady_clock::now();
    const io_snapshot snap0 = io_counters::instance().snapshot();

    iteration_stats stats;
    stats.iteration = iter;
    stats.strategy = opt_.plan.kind;
    for (const auto flag : active_) stats.active_intervals += flag ? 1 : 0;

    rows_processed_.assign(p_, 0);
    for (std::uint32_t i = 0; i < p_; ++i)
      rows_processed_[i] = (!K::skip_inactive_rows || active_[i]) ? 1 : 0;

    std::vector<std::uint64_t> changed(p_, 0);

    // Seed the resident current buffers from the committed values.
    for (std::uint32_t j = 0; j < q_; ++j) {
      const auto count = static_cast<std::int64_t>(cur_resident_[j].size());
#pragma omp parallel for schedule(static) num_threads(opt_.threads)
      for (std::int64_t v = 0; v < count; ++v)
        cur_resident_[j][v] = kernel_.iteration_init(prev_resident_[j][v]);
    }

    // Resident rows into resident columns (the in-memory block).
    if (opt_.plan.sync == sync_mode::lock)
      resident_block_lock_mode();
    else
      resident_block_callback_mode();

    // Disk rows: one load each; direct updates into resident columns,
    // contributions into hubs for disk columns.
    for (std::uint32_t i = q_; i < p_; ++i) {
      if (!rows_processed_[i]) continue;
      const auto& src_iv = man_.interval(i);
      const auto prev_i = load_attrs<attr_t>(interval_path(dir_, i), src_iv);
      if (!K::copy_forward) stash_init_moved(i, prev_i);
      for (std::uint32_t j = 0; j < q_; ++j) {
        log_visit({i, j}, visit_phase::direct);
        if (cell_edges(i, j) == 0) continue;
        const auto block = decode_cell(i, j);
        run_units_direct(block, src_iv, prev_i, man_.interval(j), cur_resident_[j],
                         nullptr, true);
      }
      for (std::uint32_t j = q_; j < p_; ++j) {
        log_visit({i, j}, visit_phase::to_hub);
        if (cell_edges(i, j) == 0) continue;
        const auto block = decode_cell(i, j);
        const auto hub = build_hub(block, src_iv, prev_i, true);
        save_typed_hub(hub_path(dir_, i, j), hub, man_.interval(j));
      }
    }

    // Disk columns: resident-source direct updates first, then hub
    // accumulation in ascending row order, then one save each.
    for (std::uint32_t j = q_; j < p_; ++j) {
      if (!column_needed(j)) continue;
      const auto& dst_iv = man_.interval(j);

      std::optional<std::vector<attr_t>> prev_j;
      std::vector<attr_t> cur_j;
      if (K::copy_forward || kernel_.exact_change_needs_prev())
        prev_j = load_attrs<attr_t>(interval_path(dir_, j), dst_iv);
      if (prev_j) {
        cur_j.resize(dst_iv.count);
        for (std::uint32_t v = 0; v < dst_iv.count; ++v)
          cur_j[v] = kernel_.iteration_init((*prev_j)[v]);
      } else {
        cur_j.assign(dst_iv.count, kernel_.iteration_init(attr_t{}));
      }

      std::vector<std::uint8_t> received;
      if (!prev_j) received.assign(dst_iv.count, 0);
      auto* received_ptr = prev_j ? nullptr : &received;

      for (std::uint32_t i = 0; i < q_; ++i) {
        if (!rows_processed_[i]) continue;
        log_visit({i, j}, visit_phase::direct);
        if (cell_edges(i, j) == 0) continue;
        const auto block = decode_cell(i, j);
        run_units_direct(block, man_.interval(i), prev_resident_[i], dst_iv, cur_j,
                         received_ptr, true);
      }
      for (std::uint32_t i = q_; i < p_; ++i) {
        if (!rows_processed_[i]) continue;
        log_visit({i, j}, visit_phase::from_hub);
        if (cell_edges(i, j) == 0) continue;
        const auto path = hub_path(dir_, i, j);
        if (!std::filesystem::exists(path))
          fail(errc::internal, "missing hub for an active row: " + path.string());
        const auto hub = load_typed_hub<attr_t>(path, dst_iv);
        apply_hub(hub, dst_iv, cur_j, received_ptr, true);
      }

      if (prev_j) {
        std::uint64_t count = 0;
        for (std::uint32_t v = 0; v < dst_iv.count; ++v)
          if (kernel_.changed((*prev_j)[v], cur_j[v])) ++count;
        changed[j] = count;
      } else {
        // No previous copy on this path: a vertex counts as changed when it
        // received a contribution or its seed moved away from the committed
        // value (flags stashed while this interval was loaded as a row).
        std::uint64_t count = 0;
        const auto& moved = init_moved_[j];
        for (std::uint32_t v = 0; v < dst_iv.count; ++v)
          if (received[v] || (!moved.empty() && moved[v])) ++count;
        changed[j] = count;
      }
      save_attrs(interval_path(dir_, j), dst_iv, cur_j);
    }

    // Resident columns: exact per-vertex diff, then the ping-pong swap.
    for (std::uint32_t j = 0; j < q_; ++j) {
      const auto& iv = man_.interval(j);
      std::uint64_t count = 0;
#pragma omp parallel for schedule(static) num_threads(opt_.threads) reduction(+ : count)
      for (std::int64_t v = 0; v < static_cast<std::int64_t>(iv.count); ++v)
        if (kernel_.changed(prev_resident_[j][v], cur_resident_[j][v])) ++count;
      changed[j] = count;
    }
    std::swap(prev_resident_, cur_resident_);

    for (std::uint32_t i = 0; i < p_; ++i) {
      active_[i] = changed[i] > 0 ? 1 : 0;
      stats.changed_vertices += changed[i];
    }

    const io_snapshot snap1 = io_counters::instance().snapshot();
    stats.bytes_read = snap1.bytes_read - snap0.bytes_read;
    stats.bytes_written = snap1.bytes_written - snap0.bytes_written;
    stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return stats;
  }

  /// A disk column is touched only when some processed row can contribute
  /// to it; reset-to-base kernels rebuild every column each iteration.
  bool column_needed(std::uint32_t j) const {
    if (!K::copy_forward) return true;
    for (std::uint32_t i = 0; i < p_; ++i)
      if (rows_processed_[i] && cell_edges(i, j) > 0) return true;
    return false;
  }

  void stash_init_moved(std::uint32_t i, const std::vector<attr_t>& prev) {
    auto& flags = init_moved_[i];
    flags.assign(prev.size(), 0);
    for (std::size_t v = 0; v < prev.size(); ++v)
      if (kernel_.changed(prev[v], kernel_.iteration_init(prev[v]))) flags[v] = 1;
  }

  // --- resident-block execution, two synchronization flavors

  /// Row-synchronous: all units of one row run in parallel (they never share
  /// a destination), and the implicit barrier is the completion signal that
  /// releases every destination interval to the next row.
  void resident_block_callback_mode() {
    for (std::uint32_t i = 0; i < q_; ++i) {
      if (!rows_processed_[i]) continue;
      const auto& src_iv = man_.interval(i);
      for (std::uint32_t j = 0; j < q_; ++j) {
        log_visit({i, j}, visit_phase::direct);
        if (cell_edges(i, j) == 0) continue;
        const auto block = decode_cell(i, j);
        run_units_direct(block, src_iv, prev_resident_[i], man_.interval(j),
                         cur_resident_[j], nullptr, true);
      }
    }
  }

  /// Turnstile-locked: cells of later rows start as soon as the same
  /// destination interval is released by the previous row, so rows overlap.
  /// The per-column turn order keeps results identical to callback mode.
  void resident_block_lock_mode() {
    struct cell_task {
      std::uint32_t pos;  // position within the column's row sequence
      std::uint32_t i, j;
    };
    std::vector<cell_task> tasks;
    std::vector<std::uint32_t> pos(q_, 0);
    for (std::uint32_t i = 0; i < q_; ++i) {
      if (!rows_processed_[i]) continue;
      for (std::uint32_t j = 0; j < q_; ++j) tasks.push_back({pos[j]++, i, j});
    }
    if (tasks.empty()) return;

    struct column_gate {
      std::mutex mu;
      std::condition_variable cv;
      std::uint32_t next = 0;
    };
    std::vector<column_gate> gates(q_);
    std::atomic<std::size_t> next_task{0};

    const auto worker = [&] {
      for (;;) {
        const std::size_t t = next_task.fetch_add(1);
        if (t >= tasks.size()) return;
        const auto [position, i, j] = tasks[t];
        auto& gate = gates[j];
        {
          std::unique_lock lock(gate.mu);
          gate.cv.wait(lock, [&] { return gate.next == position; });
        }
        if (cell_edges(i, j) > 0) {
          const auto block = decode_cell(i, j);
          run_units_direct(block, man_.interval(i), prev_resident_[i], man_.interval(j),
                           cur_resident_[j], nullptr, false);
        }
        {
          std::lock_guard lock(gate.mu);
          gate.next = position + 1;
        }
        gate.cv.notify_all();
      }
    };

    std::vector<std::thread> pool;
    const std::uint32_t workers = std::max(1u, opt_.threads);
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // --- state

  std::filesystem::path dir_;
  graph_manifest man_;
  K kernel_;
  run_options opt_;
  std::uint32_t p_ = 0;
  std::uint32_t q_ = 0;
  const std::vector<std::vector<std::uint64_t>>* counts_ = nullptr;
  std::vector<std::uint32_t> out_degrees_;
  std::vector<std::vector<attr_t>> prev_resident_;
  std::vector<std::vector<attr_t>> cur_resident_;
  std::vector<std::uint8_t> active_;
  std::vector<std::uint8_t> rows_processed_;
  std::vector<std::vector<std::uint8_t>> init_moved_;
  std::unordered_map<std::uint64_t, std::vector<unsigned char>> cache_;
  std::uint64_t cache_used_ = 0;
  std::mutex cache_mu_;
};

}  // namespace nxcore
