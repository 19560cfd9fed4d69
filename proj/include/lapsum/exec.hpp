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

namespace lapsum {

/// Selects the kernel family. `serial` is the single-threaded reference
/// path; `parallel` runs the OpenMP kernels (and falls back to the serial
/// loops when the library was built without OpenMP).
enum class Exec { serial, parallel };

/// True when the parallel kernels were compiled with OpenMP.
bool openmp_enabled() noexcept;

/// Number of threads the parallel kernels will use.
int max_threads() noexcept;

/// Sets the thread count for subsequent parallel kernels (no-op without OpenMP).
void set_threads(int count) noexcept;

} // namespace lapsum
