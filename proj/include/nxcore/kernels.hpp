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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "nxcore/common.hpp"

namespace nxcore {

/// Sentinel for unreached vertices: the maximum representable attribute,
/// so a gather from it is skipped instead of overflowing.
inline constexpr std::uint32_t unreached = std::numeric_limits<std::uint32_t>::max();

/// Damped PageRank. Ranks start uniform at 1/n; every iteration rebuilds a
/// vertex from the (1-alpha)/n base plus alpha-weighted contributions of its
/// in-neighbors. A vertex with no out-edges contributes nothing (its rank
/// leaks; there is no dangling redistribution).
struct pagerank_kernel {
  using attr_t = double;
  static constexpr bool copy_forward = false;
  static constexpr bool skip_inactive_rows = false;
  static constexpr bool needs_out_degrees = true;

  double alpha = 0.85;
  double epsilon = 0.0;
  std::uint64_t n = 0;

  attr_t init(vertex_id) const { return 1.0 / static_cast<double>(n); }
  bool initially_active(vertex_id) const { return true; }
  attr_t iteration_init(attr_t) const { return (1.0 - alpha) / static_cast<double>(n); }
  bool gather(vertex_id, attr_t src_rank, std::uint32_t out_degree, attr_t& c) const {
    if (out_degree == 0) return false;
    c = alpha * src_rank / static_cast<double>(out_degree);
    return true;
  }
  attr_t combine(attr_t a, attr_t b) const { return a + b; }
  attr_t apply(vertex_id, attr_t cur, attr_t c) const { return cur + c; }
  bool changed(attr_t prev, attr_t cur) const { return std::fabs(cur - prev) > epsilon; }
  bool exact_change_needs_prev() const { return epsilon > 0.0; }
};

/// Breadth-first search from a root: depths propagate as min(src)+1.
struct bfs_kernel {
  using attr_t = std::uint32_t;
  static constexpr bool copy_forward = true;
  static constexpr bool skip_inactive_rows = true;
  static constexpr bool needs_out_degrees = false;

  vertex_id root = 0;

  attr_t init(vertex_id v) const { return v == root ? 0 : unreached; }
  bool initially_active(vertex_id v) const { return v == root; }
  attr_t iteration_init(attr_t prev) const { return prev; }
  bool gather(vertex_id, attr_t src_depth, std::uint32_t, attr_t& c) const {
    if (src_depth == unreached) return false;
    c = src_depth + 1;
    return true;
  }
  attr_t combine(attr_t a, attr_t b) const { return std::min(a, b); }
  attr_t apply(vertex_id, attr_t cur, attr_t c) const { return std::min(cur, c); }
  bool changed(attr_t prev, attr_t cur) const { return cur != prev; }
  bool exact_change_needs_prev() const { return false; }
};

/// Weakly connected components as min-label propagation. Requires shards
/// preprocessed with symmetrization so labels flow both ways.
struct wcc_kernel {
  using attr_t = std::uint32_t;
  static constexpr bool copy_forward = true;
  static constexpr bool skip_inactive_rows = true;
  static constexpr bool needs_out_degrees = false;

  attr_t init(vertex_id v) const { return v; }
  bool initially_active(vertex_id) const { return true; }
  attr_t iteration_init(attr_t prev) const { return prev; }
  bool gather(vertex_id, attr_t src_label, std::uint32_t, attr_t& c) const {
    c = src_label;
    return true;
  }
  attr_t combine(attr_t a, attr_t b) const { return std::min(a, b); }
  attr_t apply(vertex_id, attr_t cur, attr_t c) const { return std::min(cur, c); }
  bool changed(attr_t prev, attr_t cur) const { return cur != prev; }
  bool exact_change_needs_prev() const { return false; }
};

/// One propagation pass of the strongly-connected-component driver:
/// min-label flooding restricted to unassigned vertices. Frozen vertices
/// neither emit nor accept labels.
struct scc_phase_kernel {
  using attr_t = std::uint32_t;
  static constexpr bool copy_forward = true;
  static constexpr bool skip_inactive_rows = true;
  static constexpr bool needs_out_degrees = false;

  const std::uint8_t* frozen = nullptr;  // n flags owned by the driver

  attr_t init(vertex_id v) const { return frozen[v] ? unreached : v; }
  bool initially_active(vertex_id v) const { return !frozen[v]; }
  attr_t iteration_init(attr_t prev) const { return prev; }
  bool gather(vertex_id, attr_t src_label, std::uint32_t, attr_t& c) const {
    if (src_label == unreached) return false;
    c = src_label;
    return true;
  }
  attr_t combine(attr_t a, attr_t b) const { return std::min(a, b); }
  attr_t apply(vertex_id dst, attr_t cur, attr_t c) const {
    return frozen[dst] ? cur : std::min(cur, c);
  }
  bool changed(attr_t prev, attr_t cur) const { return cur != prev; }
  bool exact_change_needs_prev() const { return false; }
};

// ---------------------------------------------------------------------------
// Output reductions (the final interval walk of a run)

/// Maximum finite depth; 0 when only the root was reached.
std::uint32_t bfs_output(const std::vector<std::uint32_t>& depths);

/// Number of distinct labels.
std::uint64_t count_labels(const std::vector<std::uint32_t>& labels);

}  // namespace nxcore
