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

#include "nxcore/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace nxcore {
namespace {

using u128 = unsigned __int128;

double exact(u128 value) { return static_cast<double>(value); }

void check_params(const cost_params& p, bool need_grid) {
  if (p.n == 0 || p.m == 0 || p.attr_bytes == 0 || p.id_bytes == 0 || p.edge_bytes == 0)
    fail(errc::config, "cost parameters must be positive");
  if (p.avg_hub_in_degree < 1.0) fail(errc::config, "d must be at least 1");
  if (need_grid) {
    if (p.p == 0) fail(errc::config, "P must be positive for the integral MPU form");
    if (p.q > p.p) fail(errc::config, "Q cannot exceed P");
  }
}

}  // namespace

io_estimate io_spu(const cost_params& p) {
  check_params(p, false);
  const u128 two_intervals = u128{2} * p.n * p.attr_bytes;
  if (p.memory_budget <= two_intervals)
    fail(errc::infeasible_budget, "SPU needs a budget above two full interval copies");
  const u128 stream = u128{p.m} * p.edge_bytes + two_intervals;
  io_estimate est;
  est.read_bytes = p.memory_budget >= stream ? 0.0 : exact(stream - p.memory_budget);
  est.write_bytes = 0.0;
  return est;
}

io_estimate io_dpu(const cost_params& p) {
  check_params(p, false);
  const double hub = exact(u128{p.m} * (p.attr_bytes + p.id_bytes)) / p.avg_hub_in_degree;
  const double interval = exact(u128{p.n} * p.attr_bytes);
  io_estimate est;
  est.read_bytes = exact(u128{p.m} * p.edge_bytes) + hub + interval;
  est.write_bytes = hub + interval;
  return est;
}

io_estimate io_mpu(const cost_params& p) {
  check_params(p, true);
  const std::uint64_t rest = p.p - p.q;  // P - Q
  const double hub = exact(u128{rest} * rest * p.m * (p.attr_bytes + p.id_bytes)) /
                     (exact(u128{p.p} * p.p) * p.avg_hub_in_degree);
  const double interval = exact(u128{rest} * p.n * p.attr_bytes) / exact(u128{p.p});
  io_estimate est;
  est.read_bytes = exact(u128{p.m} * p.edge_bytes) + hub + interval;
  est.write_bytes = hub + interval;
  return est;
}

io_estimate io_turbograph_like(const cost_params& p) {
  check_params(p, false);
  if (p.memory_budget == 0) fail(errc::config, "B_M must be positive");
  const double n_attr = exact(u128{p.n} * p.attr_bytes);
  const double grid_term = 2.0 * n_attr * n_attr / static_cast<double>(p.memory_budget);
  io_estimate est;
  est.read_bytes = exact(u128{p.m} * p.edge_bytes + u128{p.n} * p.attr_bytes) + grid_term;
  est.write_bytes = n_attr;
  return est;
}

double mpu_total_continuous(const cost_params& p) {
  check_params(p, false);
  const double n_attr = exact(u128{p.n} * p.attr_bytes);
  const double f = 1.0 - static_cast<double>(p.memory_budget) / (2.0 * n_attr);
  const double hub = exact(u128{p.m} * (p.attr_bytes + p.id_bytes)) / p.avg_hub_in_degree;
  return exact(u128{p.m} * p.edge_bytes) + 2.0 * f * f * hub + 2.0 * f * n_attr;
}

double turbograph_total_continuous(const cost_params& p) {
  check_params(p, false);
  if (p.memory_budget == 0) fail(errc::config, "B_M must be positive");
  const double n_attr = exact(u128{p.n} * p.attr_bytes);
  // Streaming read plus one interval pass each way; the grid term dominates
  // at small budgets.
  return exact(u128{p.m} * p.edge_bytes) +
         2.0 * n_attr * n_attr / static_cast<double>(p.memory_budget) + n_attr;
}

std::vector<ratio_point> ratio_curve(const cost_params& p, std::span<const double> budgets) {
  check_params(p, false);
  const double cap = 2.0 * exact(u128{p.n} * p.attr_bytes);
  std::vector<ratio_point> points;
  points.reserve(budgets.size());
  for (const double b : budgets) {
    if (!(b > 0.0) || b > cap)
      fail(errc::config, "budget grid point outside (0, 2nB_a]");
    cost_params at = p;
    at.memory_budget = static_cast<std::uint64_t>(b);
    ratio_point pt;
    pt.memory_budget = b;
    pt.mpu_total = mpu_total_continuous(at);
    pt.turbograph_total = turbograph_total_continuous(at);
    pt.ratio = pt.mpu_total / pt.turbograph_total;
    points.push_back(pt);
  }
  return points;
}

std::vector<double> linear_grid(double lo, double hi, std::uint32_t steps) {
  if (steps == 0 || !(lo <= hi)) fail(errc::config, "bad grid specification");
  std::vector<double> grid;
  grid.reserve(steps);
  if (steps == 1) {
    grid.push_back(hi);
    return grid;
  }
  for (std::uint32_t k = 0; k < steps; ++k)
    grid.push_back(lo + (hi - lo) * static_cast<double>(k) / (steps - 1));
  return grid;
}

std::string ratio_curve_csv(std::span<const ratio_point> points) {
  std::string csv = "b_m,b_mpu,b_tg,ratio\n";
  char row[160];
  for (const auto& pt : points) {
    std::snprintf(row, sizeof(row), "%.3f,%.3f,%.3f,%.6f\n", pt.memory_budget,
                  pt.mpu_total, pt.turbograph_total, pt.ratio);
    csv += row;
  }
  return csv;
}

reconcile_report reconcile(const io_snapshot& measured, const io_estimate& predicted,
                           double overhead_fraction) {
  reconcile_report report;
  report.measured = measured;
  report.measured_read = static_cast<double>(measured.bytes_read);
  report.measured_write = static_cast<double>(measured.bytes_written);
  report.predicted_read = predicted.read_bytes;
  report.predicted_write = predicted.write_bytes;
  report.overhead_fraction = overhead_fraction;
  const double slack = 1.0 + overhead_fraction;
  report.read_ok = report.measured_read <= report.predicted_read * slack;
  report.write_ok = report.measured_write <= report.predicted_write * slack;
  return report;
}

double measured_hub_in_degree(const graph_manifest& man, std::uint32_t q,
                              bool transposed) {
  const auto& edges = transposed ? man.edge_counts_transpose : man.edge_counts;
  const auto& records = transposed ? man.record_counts_transpose : man.record_counts;
  std::uint64_t hub_edges = 0;
  std::uint64_t hub_records = 0;
  for (std::uint32_t i = q; i < man.p; ++i) {
    for (std::uint32_t j = q; j < man.p; ++j) {
      hub_edges += edges[i][j];
      hub_records += records[i][j];
    }
  }
  if (hub_records == 0) return 1.0;
  return std::max(1.0, static_cast<double>(hub_edges) / static_cast<double>(hub_records));
}

std::string format_reconcile(const reconcile_report& report) {
  static const char* names[io_category_count] = {"sub_shard", "interval", "hub", "meta"};
  char line[256];
  std::string text;
  std::snprintf(line, sizeof(line), "read measured=%.0f predicted=%.0f %s\n",
                report.measured_read, report.predicted_read,
                report.read_ok ? "ok" : "EXCEEDED");
  text += line;
  std::snprintf(line, sizeof(line), "write measured=%.0f predicted=%.0f %s\n",
                report.measured_write, report.predicted_write,
                report.write_ok ? "ok" : "EXCEEDED");
  text += line;
  for (unsigned c = 0; c < io_category_count; ++c) {
    std::snprintf(line, sizeof(line), "  %s read=%llu write=%llu\n", names[c],
                  static_cast<unsigned long long>(report.measured.read_by[c]),
                  static_cast<unsigned long long>(report.measured.written_by[c]));
    text += line;
  }
  return text;
}

}  // namespace nxcore
