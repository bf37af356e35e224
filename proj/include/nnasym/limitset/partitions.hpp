// Copyright 2026 The nnasym Authors
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

#include <cstddef>
#include <functional>
#include <vector>

#include "nnasym/errors.hpp"
#include "nnasym/model.hpp"

namespace nnasym {

/// Canonical label vector: zero-weight units first, then the classes of true
/// units 1..k0 in order, then free units.
inline Partition make_partition(std::size_t k0, std::size_t n_zero, const std::vector<std::size_t>& class_sizes,
                                std::size_t n_free) {
  if (class_sizes.size() != k0) throw InvalidInput("one class size per true unit is required");
  Partition p;
  p.k0 = k0;
  for (std::size_t j = 0; j < n_zero; ++j) p.labels.push_back(UnitLabel::zero_weight());
  for (std::size_t i = 0; i < k0; ++i)
    for (std::size_t j = 0; j < class_sizes[i]; ++j) p.labels.push_back(UnitLabel::true_unit(i));
  for (std::size_t j = 0; j < n_free; ++j) p.labels.push_back(UnitLabel::free());
  p.validate();
  return p;
}

/// Every admissible assignment of k hidden units to a k0-unit truth, one
/// representative per orbit of hidden-unit permutations.
inline std::vector<Partition> enumerate_partitions(std::size_t k, std::size_t k0) {
  if (k0 == 0) throw InvalidInput("enumerate_partitions needs k0 >= 1");
  if (k < k0) throw InvalidInput("enumerate_partitions needs k >= k0");
  std::vector<Partition> out;
  const std::size_t spare = k - k0;
  std::vector<std::size_t> sizes(k0, 1);
  // Distribute `extra` additional units over the k0 classes.
  std::function<void(std::size_t, std::size_t, std::size_t, std::size_t)> fill =
      [&](std::size_t i, std::size_t extra, std::size_t n_zero, std::size_t n_free) {
        if (i + 1 == k0) {
          sizes[i] = 1 + extra;
          out.push_back(make_partition(k0, n_zero, sizes, n_free));
          return;
        }
        for (std::size_t e = 0; e <= extra; ++e) {
          sizes[i] = 1 + e;
          fill(i + 1, extra - e, n_zero, n_free);
        }
      };
  for (std::size_t n_zero = 0; n_zero <= spare; ++n_zero)
    for (std::size_t n_free = 0; n_zero + n_free <= spare; ++n_free)
      fill(0, spare - n_zero - n_free, n_zero, n_free);
  return out;
}

}  // namespace nnasym
