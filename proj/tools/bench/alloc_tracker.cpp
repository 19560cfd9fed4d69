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

#include "lapsum/alloc_tracker.hpp"

#include <malloc.h>

#include <atomic>
#include <cstdlib>
#include <new>

namespace lapsum::bench::alloc {
namespace {

std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};
std::atomic<std::size_t> g_cap{0};

void note_alloc(void *p) noexcept {
  const std::size_t size = malloc_usable_size(p);
  const std::size_t now = g_live.fetch_add(size, std::memory_order_relaxed) + size;
  std::size_t prev = g_peak.load(std::memory_order_relaxed);
  while (now > prev && !g_peak.compare_exchange_weak(prev, now, std::memory_order_relaxed)) {
  }
}

bool over_cap(std::size_t size) noexcept {
  const std::size_t c = g_cap.load(std::memory_order_relaxed);
  return c != 0 && g_live.load(std::memory_order_relaxed) + size > c;
}

void *allocate(std::size_t size, std::size_t align) noexcept {
  if (size == 0)
    size = 1;
  if (over_cap(size))
    return nullptr;
  void *p = nullptr;
  if (align <= alignof(std::max_align_t)) {
    p = std::malloc(size);
  } else {
    const std::size_t rounded = (size + align - 1) / align * align;
    p = std::aligned_alloc(align, rounded);
  }
  if (p)
    note_alloc(p);
  return p;
}

void release(void *p) noexcept {
  if (!p)
    return;
  g_live.fetch_sub(malloc_usable_size(p), std::memory_order_relaxed);
  std::free(p);
}

} // namespace

std::size_t live_bytes() noexcept { return g_live.load(std::memory_order_relaxed); }
std::size_t peak_bytes() noexcept { return g_peak.load(std::memory_order_relaxed); }
void reset_peak() noexcept { g_peak.store(g_live.load(std::memory_order_relaxed)); }
void set_cap(std::size_t bytes) noexcept { g_cap.store(bytes); }
std::size_t cap() noexcept { return g_cap.load(); }

} // namespace lapsum::bench::alloc

namespace {
using lapsum::bench::alloc::allocate;
using lapsum::bench::alloc::release;

void *throwing(std::size_t size, std::size_t align) {
  if (void *p = allocate(size, align))
    return p;
  throw std::bad_alloc();
}
} // namespace

void *operator new(std::size_t size) { return throwing(size, 0); }
void *operator new[](std::size_t size) { return throwing(size, 0); }
void *operator new(std::size_t size, std::align_val_t al) {
  return throwing(size, static_cast<std::size_t>(al));
}
void *operator new[](std::size_t size, std::align_val_t al) {
  return throwing(size, static_cast<std::size_t>(al));
}
void *operator new(std::size_t size, const std::nothrow_t &) noexcept { return allocate(size, 0); }
void *operator new[](std::size_t size, const std::nothrow_t &) noexcept { return allocate(size, 0); }
void *operator new(std::size_t size, std::align_val_t al, const std::nothrow_t &) noexcept {
  return allocate(size, static_cast<std::size_t>(al));
}
void *operator new[](std::size_t size, std::align_val_t al, const std::nothrow_t &) noexcept {
  return allocate(size, static_cast<std::size_t>(al));
}

void operator delete(void *p) noexcept { release(p); }
void operator delete[](void *p) noexcept { release(p); }
void operator delete(void *p, std::size_t) noexcept { release(p); }
void operator delete[](void *p, std::size_t) noexcept { release(p); }
void operator delete(void *p, std::align_val_t) noexcept { release(p); }
void operator delete[](void *p, std::align_val_t) noexcept { release(p); }
void operator delete(void *p, std::size_t, std::align_val_t) noexcept { release(p); }
void operator delete[](void *p, std::size_t, std::align_val_t) noexcept { release(p); }
void operator delete(void *p, const std::nothrow_t &) noexcept { release(p); }
void operator delete[](void *p, const std::nothrow_t &) noexcept { release(p); }
void operator delete(void *p, std::align_val_t, const std::nothrow_t &) noexcept { release(p); }
void operator delete[](void *p, std::align_val_t, const std::nothrow_t &) noexcept { release(p); }
