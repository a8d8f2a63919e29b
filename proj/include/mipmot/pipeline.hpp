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

#include <chrono>
#include <optional>
#include <vector>

#include "mipmot/io.hpp"
#include "mipmot/tracker.hpp"

namespace mipmot {

struct SequenceRun {
  std::vector<FrameResult> frames;
  double mean_frame_seconds = 0.0;  // tracking latency per frame
};

// Tracks every frame from 0 through the last detected frame (or
// `last_frame` if larger); frames without detections still advance tracks.
inline SequenceRun run_sequence(const FrameDetections& detections, const TrackerConfig& cfg,
                                std::optional<int> last_frame = std::nullopt) {
  SequenceRun run;
  int end = detections.empty() ? -1 : detections.rbegin()->first;
  if (last_frame) end = std::max(end, *last_frame);
  Tracker tracker(cfg);
  const std::vector<Detection> none;
  double total = 0.0;
  for (int f = 0; f <= end; ++f) {
    const auto it = detections.find(f);
    const auto t0 = std::chrono::steady_clock::now();
    run.frames.push_back(tracker.step(f, it == detections.end() ? none : it->second));
    total += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  if (end >= 0) run.mean_frame_seconds = total / static_cast<double>(end + 1);
  return run;
}

}  // namespace mipmot
