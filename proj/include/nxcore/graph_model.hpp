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
#include <vector>

#include "nxcore/common.hpp"

namespace nxcore {

/// A contiguous range of vertex ids. The unit of memory residency and
/// activity tracking.
struct interval_range {
  std::uint32_t index = 0;  ///< interval ordinal in [0, P)
  vertex_id first = 0;      ///< first vertex id in the range
  std::uint32_t count = 0;  ///< number of vertices

  vertex_id end() const { return first + count; }
  bool contains(vertex_id v) const { return v >= first && v < end(); }

  friend bool operator==(const interval_range&, const interval_range&) = default;
};

/// Grid coordinate of a sub-shard: sources in interval `src_interval`,
/// destinations in interval `dst_interval`.
struct sub_shard_id {
  std::uint32_t src_interval = 0;
  std::uint32_t dst_interval = 0;

  friend bool operator==(const sub_shard_id&, const sub_shard_id&) = default;
  friend auto operator<=>(const sub_shard_id&, const sub_shard_id&) = default;
};

/// Splits [0, n) into P contiguous intervals. The first (n mod P) intervals
/// get one extra vertex, so sizes differ by at most one.
std::vector<interval_range> partition_vertices(std::uint64_t n, std::uint32_t p);

/// Constant-time inverse of the equal split: the ordinal of the interval
/// containing v. Throws errc::out_of_range for v >= n.
std::uint32_t locate_interval(vertex_id v, std::uint64_t n, std::uint32_t p);

/// Convenience overload against a materialized partition.
std::uint32_t locate_interval(vertex_id v, const std::vector<interval_range>& ranges);

/// Grid cell the edge belongs to.
sub_shard_id subshard_of(const edge& e, std::uint64_t n, std::uint32_t p);

}  // namespace nxcore
