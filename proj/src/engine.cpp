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

#include "nxcore/engine.hpp"

#include <cstdio>

namespace nxcore {

const char* strategy_name(update_strategy kind) {
  switch (kind) {
    case update_strategy::spu: return "spu";
    case update_strategy::dpu: return "dpu";
    case update_strategy::mpu: return "mpu";
  }
  return "?";
}

strategy_plan select_strategy(const graph_manifest& man, std::uint64_t budget,
                              std::uint32_t attr_width) {
  if (budget == 0) fail(errc::infeasible_budget, "memory budget must be positive");
  const std::uint64_t interval_bytes =
      std::uint64_t{man.max_interval_size()} * attr_width;
  const std::uint64_t floor_bytes = 2 * interval_bytes + stream_reserve_bytes;
  if (budget < floor_bytes)
    fail(errc::infeasible_budget,
         "budget of " + std::to_string(budget) + " bytes is below the minimum of " +
             std::to_string(floor_bytes) +
             " (two interval copies plus a streaming buffer)");

  const std::uint64_t all_pairs = 2 * man.n * attr_width;
  if (budget >= all_pairs)
    return {update_strategy::spu, man.p, sync_mode::callback, budget - all_pairs};

  // Q = floor(B_M / (2 n B_a) * P). The feasibility floor above already
  // guarantees Q >= 1 here; the DPU arm stays for explicitly planned runs.
  const std::uint32_t q = static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(budget) * man.p) / all_pairs);
  if (q == 0) return {update_strategy::dpu, 0, sync_mode::callback, 0};
  if (q >= man.p) return {update_strategy::spu, man.p, sync_mode::callback, 0};
  return {update_strategy::mpu, q, sync_mode::callback, 0};
}

std::vector<work_unit> partition_work(const sub_shard_block& block,
                                      std::uint32_t target_units) {
  std::vector<work_unit> units;
  const std::uint32_t records = block.record_count();
  if (records == 0) return units;
  if (target_units <= 1) {
    units.push_back({0, records});
    return units;
  }
  const std::uint64_t ideal =
      (block.edge_count + target_units - 1) / target_units;

  work_unit unit{0, 0};
  std::uint64_t unit_edges = 0;
  for (std::uint32_t r = 0; r < records; ++r) {
    const std::uint64_t record_edges =
        block.record_offsets[r + 1] - block.record_offsets[r];
    if (unit_edges > 0 && unit_edges + record_edges > ideal) {
      unit.rec_end = r;
      units.push_back(unit);
      unit = {r, 0};
      unit_edges = 0;
    }
    unit_edges += record_edges;
  }
  unit.rec_end = records;
  units.push_back(unit);
  return units;
}

std::string format_stats_line(const iteration_stats& s) {
  char line[256];
  std::snprintf(line, sizeof(line),
                "iter=%u strategy=%s active_intervals=%u changed_vertices=%llu "
                "bytes_read=%llu bytes_written=%llu wall_ms=%.3f",
                s.iteration, strategy_name(s.strategy), s.active_intervals,
                static_cast<unsigned long long>(s.changed_vertices),
                static_cast<unsigned long long>(s.bytes_read),
                static_cast<unsigned long long>(s.bytes_written), s.wall_ms);
  return line;
}

}  // namespace nxcore
