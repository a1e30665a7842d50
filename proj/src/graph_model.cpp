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

#include "nxcore/graph_model.hpp"

#include <string>

namespace nxcore {

std::vector<interval_range> partition_vertices(std::uint64_t n, std::uint32_t p) {
  if (n < 1) fail(errc::invalid_partition, "cannot partition an empty vertex set");
  if (p == 0 || p > n)
    fail(errc::invalid_partition,
         "invalid partition: P=" + std::to_string(p) + " for n=" + std::to_string(n));

  const std::uint64_t small = n / p;
  const std::uint64_t big_count = n % p;  // this many intervals get small+1

  std::vector<interval_range> ranges;
  ranges.reserve(p);
  std::uint64_t first = 0;
  for (std::uint32_t i = 0; i < p; ++i) {
    const std::uint64_t count = small + (i < big_count ? 1 : 0);
    ranges.push_back({i, static_cast<vertex_id>(first), static_cast<std::uint32_t>(count)});
    first += count;
  }
  return ranges;
}

std::uint32_t locate_interval(vertex_id v, std::uint64_t n, std::uint32_t p) {
  if (v >= n)
    fail(errc::out_of_range,
         "vertex " + std::to_string(v) + " out of range [0, " + std::to_string(n) + ")");
  const std::uint64_t small = n / p;
  const std::uint64_t big_count = n % p;
  const std::uint64_t boundary = big_count * (small + 1);
  if (v < boundary) return static_cast<std::uint32_t>(v / (small + 1));
  return static_cast<std::uint32_t>(big_count + (v - boundary) / small);
}

std::uint32_t locate_interval(vertex_id v, const std::vector<interval_range>& ranges) {
  if (ranges.empty()) fail(errc::invalid_partition, "empty partition");
  const std::uint64_t n = ranges.back().first + std::uint64_t{ranges.back().count};
  return locate_interval(v, n, static_cast<std::uint32_t>(ranges.size()));
}

sub_shard_id subshard_of(const edge& e, std::uint64_t n, std::uint32_t p) {
  return {locate_interval(e.src, n, p), locate_interval(e.dst, n, p)};
}

}  // namespace nxcore
