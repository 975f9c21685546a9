// Copyright 2026 The goaldirector Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace gdir {

// Stateless keyed randomness. Every draw is a pure function of a key built by
// mixing parent keys with labels, so results never depend on call order or on
// which thread made the call.

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// FNV-1a over the bytes of a string; stable across platforms and runs.
std::uint64_t fnv1a(std::string_view s) noexcept;

std::uint64_t mix(std::uint64_t key, std::uint64_t value) noexcept;
std::uint64_t mix(std::uint64_t key, std::initializer_list<std::uint64_t> values) noexcept;

// Uniform double in [0, 1) from the top 53 bits.
double unit_interval(std::uint64_t bits) noexcept;

// Uniform integer in [0, n); n must be > 0.
std::uint64_t uniform_index(std::uint64_t bits, std::uint64_t n) noexcept;

}  // namespace gdir
