// Copyright 2026 The NALM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NALM_FORMATS_HPP_
#define NALM_FORMATS_HPP_

#include <string>
#include <string_view>

#include "nalm/trace.hpp"

namespace nalm {

/// Trace archive (one or more columns of watts):
///
///   # nalm-traces 1
///   # day YYYY-MM-DD
///   # column <name> <type> full|partial        (one line per column)
///   second,<name>,<name>...
///   0,<watts>,<watts>...
///
/// Mask file (one or more columns of 0/1):
///
///   # nalm-mask 1
///   # day YYYY-MM-DD
///   # column <name> <type>
///   second,<name>...
///   0,<0|1>...
///
/// Names and types are non-empty and free of whitespace and commas. Reals
/// use the shortest representation that round-trips, so writing the same
/// data always yields the same bytes.
std::string write_trace_set(const TraceSet& traces);
TraceSet read_trace_set(std::string_view text);

/// Single-column archive for an aggregate (or any lone) trace. The column
/// is named after the trace origin with type "aggregate".
std::string write_trace(const PowerTrace& trace);
/// Throws ParseError unless the archive has exactly one column.
PowerTrace read_trace(std::string_view text);

std::string write_mask(const StateMask& mask);
StateMask read_mask(std::string_view text);

/// Whole-file helpers; throw Error on I/O failure. write_file() creates
/// missing parent directories.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace nalm

#endif  // NALM_FORMATS_HPP_
