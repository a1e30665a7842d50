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
#include <span>
#include <string>
#include <vector>

#include "nxcore/common.hpp"
#include "nxcore/io_counters.hpp"
#include "nxcore/storage.hpp"

namespace nxcore {

/// Inputs to the per-iteration disk traffic formulas. Byte widths are exact
/// integers; the average in-degree of hubbed destinations (d) is the one
/// empirical quantity.
struct cost_params {
  std::uint64_t n = 0;             ///< vertices
  std::uint64_t m = 0;             ///< edges
  std::uint32_t attr_bytes = 8;    ///< B_a, bytes per vertex attribute
  std::uint32_t id_bytes = 4;      ///< B_v, bytes per vertex id
  std::uint32_t edge_bytes = 4;    ///< B_e, bytes per stored edge
  std::uint64_t memory_budget = 0; ///< B_M
  double avg_hub_in_degree = 15.0; ///< d, >= 1
  std::uint32_t p = 0;             ///< intervals (integral MPU form only)
  std::uint32_t q = 0;             ///< resident intervals (integral MPU form only)
};

struct io_estimate {
  double read_bytes = 0;
  double write_bytes = 0;
  double total() const { return read_bytes + write_bytes; }
};

/// Single-phase update: everything beyond the ping-pong intervals streams
/// from disk once; nothing is written back per iteration.
io_estimate io_spu(const cost_params& p);

/// Double-phase update: interval loads/saves plus hub traffic; independent
/// of P and the memory budget.
io_estimate io_dpu(const cost_params& p);

/// Mixed-phase update with the integral resident count p.q; collapses to
/// io_spu's streaming term at Q = P and to io_dpu at Q = 0.
io_estimate io_mpu(const cost_params& p);

/// The grid-partitioned strategy both comparison systems use, at its best
/// partitioning P = 2nB_a/B_M.
io_estimate io_turbograph_like(const cost_params& p);

/// Per-iteration totals in the continuous relaxation f = 1 - B_M/(2nB_a),
/// the form the ratio curve is plotted from.
double mpu_total_continuous(const cost_params& p);
double turbograph_total_continuous(const cost_params& p);

struct ratio_point {
  double memory_budget = 0;
  double mpu_total = 0;
  double turbograph_total = 0;
  double ratio = 0;
};

/// Evaluates both totals over a budget grid in (0, 2nB_a].
std::vector<ratio_point> ratio_curve(const cost_params& p, std::span<const double> budgets);

/// Inclusive linear grid helper for the CLI's LO:HI:STEPS argument.
std::vector<double> linear_grid(double lo, double hi, std::uint32_t steps);

/// CSV rendering: header "b_m,b_mpu,b_tg,ratio", one row per grid point.
std::string ratio_curve_csv(std::span<const ratio_point> points);

struct reconcile_report {
  double measured_read = 0;
  double measured_write = 0;
  double predicted_read = 0;
  double predicted_write = 0;
  double overhead_fraction = 0;
  io_snapshot measured;  // category breakdown for the report
  bool read_ok = false;
  bool write_ok = false;

  bool ok() const { return read_ok && write_ok; }
};

/// Compares measured traffic against a prediction, allowing the declared
/// metadata overhead (headers, manifest) on top of the predicted bytes.
reconcile_report reconcile(const io_snapshot& measured, const io_estimate& predicted,
                           double overhead_fraction = 0.05);

std::string format_reconcile(const reconcile_report& report);

/// The empirical d of a sharded graph: edges over distinct destinations,
/// taken across the cells that would carry hubs when the first q intervals
/// are resident. Clamped to 1 for degenerate grids.
double measured_hub_in_degree(const graph_manifest& manifest, std::uint32_t q,
                              bool transposed = false);

}  // namespace nxcore
