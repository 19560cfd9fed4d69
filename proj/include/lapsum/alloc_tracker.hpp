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

// Allocation accounting through replaced global operator new/delete. Counts
// usable bytes of live blocks; not OS resident memory.

#include <cstddef>

namespace lapsum::bench::alloc {

std::size_t live_bytes() noexcept;
std::size_t peak_bytes() noexcept;

/// Sets the peak to the current live count.
void reset_peak() noexcept;

/// Allocations that would push live bytes past the cap throw std::bad_alloc.
/// Zero disables the cap.
void set_cap(std::size_t bytes) noexcept;
std::size_t cap() noexcept;

/// Peak growth above the live count at construction.
class PeakScope {
public:
  PeakScope() noexcept : base_(live_bytes()) { reset_peak(); }
  std::size_t delta() const noexcept {
    const std::size_t p = peak_bytes();
    return p > base_ ? p - base_ : 0;
  }

private:
  std::size_t base_;
};

} // namespace lapsum::bench::alloc
