/*
 * Copyright (C) 2026 The LapSum Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace lapsum {

enum class Errc {
  non_finite_input,
  zero_scale,
  negative_scale,
  k_out_of_range,
  dimension_mismatch,
  unsorted_targets,
  empty_input,
};

const char *to_string(Errc code) noexcept;

/// Thrown by every public entry point on a contract violation.
class Error : public std::invalid_argument {
public:
  Error(Errc code, const std::string &what)
      : std::invalid_argument(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

} // namespace lapsum
