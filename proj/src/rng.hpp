// Copyright 2026 The CEIQ Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Portable seeded shuffling over std::mt19937_64: bounded draw and
// Fisher-Yates written out.

#ifndef CEIQ_RNG_HPP_
#define CEIQ_RNG_HPP_

#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace ceiq {

inline constexpr const char* kPrngName = "mt19937_64";

// Uniform integer in [0, bound) by rejection on the top of the range.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = gen();
  } while (v >= limit);
  return v % bound;
}

// Fisher-Yates from the back.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(gen, i));
    std::swap(items[i - 1], items[j]);
  }
}

inline std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 gen(seed);
  seeded_shuffle(perm, gen);
  return perm;
}

}  // namespace ceiq

#endif  // CEIQ_RNG_HPP_
