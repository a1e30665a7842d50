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
#include <stdexcept>
#include <string>

namespace nxcore {

/// Dense vertex id. Ids are contiguous in [0, n) once preprocessing ran.
using vertex_id = std::uint32_t;

/// Raw vertex index as found in an input edge list. May be sparse.
using raw_index = std::uint64_t;

struct edge {
  vertex_id src = 0;
  vertex_id dst = 0;

  friend bool operator==(const edge&, const edge&) = default;
  friend auto operator<=>(const edge&, const edge&) = default;
};

enum class errc {
  parse_error,        // malformed input edge list
  empty_graph,        // edge list yields no edges
  invalid_partition,  // P = 0 or P > n
  out_of_range,       // vertex id beyond n
  storage,            // I/O failure
  format,             // corrupt or invariant-violating on-disk data
  geometry,           // file does not match the manifest
  infeasible_budget,  // memory budget below the engine minimum
  config,             // missing transpose / symmetrized shards, bad flags
  oversize,           // graph too large for the in-memory oracles
  internal,           // broken engine invariant
};

class nx_error : public std::runtime_error {
 public:
  nx_error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw nx_error(code, what);
}

}  // namespace nxcore
