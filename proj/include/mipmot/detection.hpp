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

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "mipmot/error.hpp"
#include "mipmot/geometry.hpp"

namespace mipmot {

using Embedding = std::vector<double>;

// One frame's measurement of one object.
struct Detection {
  Box3D box;
  double score = 1.0;                    // classification confidence
  std::optional<Embedding> embedding;    // appearance feature
  std::optional<double> start_prob;      // probability of starting a new identity

  bool operator==(const Detection&) const = default;
};

inline void validate(const Detection& d) {
  validate(d.box);
  if (!std::isfinite(d.score) || d.score < 0.0 || d.score > 1.0) {
    throw InvalidInput("detection score must be in [0, 1]");
  }
  if (d.start_prob && (!std::isfinite(*d.start_prob) || *d.start_prob < 0.0 || *d.start_prob > 1.0)) {
    throw InvalidInput("detection start probability must be in [0, 1]");
  }
  if (d.embedding) {
    for (double v : *d.embedding) {
      if (!std::isfinite(v)) throw InvalidInput("detection embedding has a non-finite entry");
    }
  }
}

}  // namespace mipmot
