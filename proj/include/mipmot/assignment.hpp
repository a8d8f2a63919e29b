// Copyright 2026 The mipmot Authors. All Rights Reserved.
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

// Rectangular linear assignment (Kuhn-Munkres with row/column potentials),
// templated on the cost type so that lexicographic costs can be used for
// exact tie-breaking.

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace mipmot {

template <typename Cost>
struct CostTraits {
  static Cost infinity() { return std::numeric_limits<Cost>::infinity(); }
  static Cost zero() { return Cost{}; }
};

// Minimizes the total cost of assigning every row to a distinct column.
// Requires rows <= cols. `cost(i, j)` returns the cost of row i, column j.
// Returns the column index for each row.
template <typename Cost, typename CostFn>
std::vector<int> solve_assignment(int rows, int cols, CostFn&& cost) {
  if (rows == 0) return {};
  using Traits = CostTraits<Cost>;
  const Cost inf = Traits::infinity();
  // 1-based internally; index 0 is the virtual start column.
  std::vector<Cost> u(rows + 1, Traits::zero()), v(cols + 1, Traits::zero());
  std::vector<int> owner(cols + 1, 0), way(cols + 1, 0);
  std::vector<Cost> minv(cols + 1);
  std::vector<char> used(cols + 1);

  for (int i = 1; i <= rows; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = owner[j0];
      Cost delta = inf;
      int j1 = 0;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const Cost cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (j1 == 0 || minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[owner[j]] = u[owner[j]] + delta;
          v[j] = v[j] - delta;
        } else {
          minv[j] = minv[j] - delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const int j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(rows, -1);
  for (int j = 1; j <= cols; ++j) {
    if (owner[j] != 0) assignment[owner[j] - 1] = j - 1;
  }
  return assignment;
}

}  // namespace mipmot
