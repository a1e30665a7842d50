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

#include "nxcore/io_counters.hpp"

namespace nxcore {

io_counters& io_counters::instance() {
  static io_counters counters;
  return counters;
}

io_snapshot io_counters::snapshot() const {
  io_snapshot s;
  for (unsigned i = 0; i < io_category_count; ++i) {
    s.read_by[i] = read_[i].load(std::memory_order_relaxed);
    s.written_by[i] = written_[i].load(std::memory_order_relaxed);
    s.opens_by[i] = opens_[i].load(std::memory_order_relaxed);
    s.bytes_read += s.read_by[i];
    s.bytes_written += s.written_by[i];
  }
  return s;
}

void io_counters::reset() {
  for (unsigned i = 0; i < io_category_count; ++i) {
    read_[i].store(0, std::memory_order_relaxed);
    written_[i].store(0, std::memory_order_relaxed);
    opens_[i].store(0, std::memory_order_relaxed);
  }
}

}  // namespace nxcore
