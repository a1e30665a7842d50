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

#include "nxcore/kernels.hpp"

namespace nxcore {

std::uint32_t bfs_output(const std::vector<std::uint32_t>& depths) {
  std::uint32_t best = 0;
  for (const auto d : depths)
    if (d != unreached) best = std::max(best, d);
  return best;
}

std::uint64_t count_labels(const std::vector<std::uint32_t>& labels) {
  std::set<std::uint32_t> distinct(labels.begin(), labels.end());
  return distinct.size();
}

}  // namespace nxcore
