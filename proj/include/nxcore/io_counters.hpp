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

#include <array>
#include <atomic>
#include <cstdint>

namespace nxcore {

/// What kind of file a byte was moved through. Used to validate the cost
/// model against measured traffic.
enum class io_category : unsigned {
  sub_shard = 0,
  interval = 1,
  hub = 2,
  meta = 3,  // manifest, mapping, degree files
};

inline constexpr unsigned io_category_count = 4;

/// A plain-value snapshot of the counters.
struct io_snapshot {
  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  std::array<std::uint64_t, io_category_count> read_by = {};
  std::array<std::uint64_t, io_category_count> written_by = {};
  std::array<std::uint64_t, io_category_count> opens_by = {};

  std::uint64_t read(io_category c) const { return read_by[static_cast<unsigned>(c)]; }
  std::uint64_t written(io_category c) const { return written_by[static_cast<unsigned>(c)]; }
  std::uint64_t opens(io_category c) const { return opens_by[static_cast<unsigned>(c)]; }

  io_snapshot operator-(const io_snapshot& rhs) const {
    io_snapshot d;
    d.bytes_read = bytes_read - rhs.bytes_read;
    d.bytes_written = bytes_written - rhs.bytes_written;
    for (unsigned i = 0; i < io_category_count; ++i) {
      d.read_by[i] = read_by[i] - rhs.read_by[i];
      d.written_by[i] = written_by[i] - rhs.written_by[i];
      d.opens_by[i] = opens_by[i] - rhs.opens_by[i];
    }
    return d;
  }
};

/// Process-wide byte accounting for everything the storage layer moves.
/// Totals are exact under any thread interleaving; counts are monotone
/// between resets.
class io_counters {
 public:
  static io_counters& instance();

  void add_read(io_category c, std::uint64_t bytes) {
    read_[static_cast<unsigned>(c)].fetch_add(bytes, std::memory_order_relaxed);
  }
  void add_written(io_category c, std::uint64_t bytes) {
    written_[static_cast<unsigned>(c)].fetch_add(bytes, std::memory_order_relaxed);
  }
  void add_open(io_category c) {
    opens_[static_cast<unsigned>(c)].fetch_add(1, std::memory_order_relaxed);
  }

  io_snapshot snapshot() const;
  void reset();

 private:
  io_counters() = default;

  std::array<std::atomic<std::uint64_t>, io_category_count> read_ = {};
  std::array<std::atomic<std::uint64_t>, io_category_count> written_ = {};
  std::array<std::atomic<std::uint64_t>, io_category_count> opens_ = {};
};

}  // namespace nxcore
