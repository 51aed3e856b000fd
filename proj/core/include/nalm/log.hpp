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

#ifndef NALM_LOG_HPP_
#define NALM_LOG_HPP_

#include <spdlog/spdlog.h>

namespace nalm {

/// Shared stderr logger for library diagnostics. Level defaults to `warn`.
spdlog::logger& logger();

}  // namespace nalm

#endif  // NALM_LOG_HPP_
