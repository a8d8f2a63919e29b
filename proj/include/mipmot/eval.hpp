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

// CLEAR MOT evaluation with ground-plane (BEV) IoU matching.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mipmot/assignment.hpp"
#include "mipmot/geometry.hpp"
#include "mipmot/io.hpp"

namespace mipmot {

struct EvalConfig {
  double iou_threshold = 0.5;   // a pair is accepted when IoU > threshold
  double mostly_tracked = 0.8;  // tracked fraction >= this counts as MT
  double mostly_lost = 0.2;     // tracked fraction <= this counts as ML
  std::optional<int> max_occluded;  // drop GT with a larger occlusion flag
};

struct LabeledBox {
  int id = 0;
  Box3D box;
};

// Ground-truth id -> hypothesis id.
using Correspondence = std::map<int, int>;

struct MatchedPair {
  int gt = 0;
  int hyp = 0;
  double iou = 0.0;
};

struct FrameMatch {
  std::vector<int> gt_ids;
  int num_hyp = 0;
  std::vector<MatchedPair> pairs;

  Correspondence correspondence() const {
    Correspondence c;
    for (const auto& p : pairs) c[p.gt] = p.hyp;
    return c;
  }
};

// Keeps last frame's pairs that still overlap enough, then matches the rest
// by maximum total IoU. Pairs at or below the threshold are never accepted.
inline FrameMatch match_frame(std::span<const LabeledBox> gt, std::span<const LabeledBox> hyp,
                              const Correspondence& previous, double iou_threshold = 0.5) {
  FrameMatch out;
  out.num_hyp = static_cast<int>(hyp.size());
  for (const auto& g : gt) out.gt_ids.push_back(g.id);

  std::vector<char> gt_used(gt.size(), 0), hyp_used(hyp.size(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto it = previous.find(gt[i].id);
    if (it == previous.end()) continue;
    for (std::size_t j = 0; j < hyp.size(); ++j) {
      if (hyp[j].id != it->second || hyp_used[j]) continue;
      const double iou = bev_iou(gt[i].box, hyp[j].box);
      if (iou > iou_threshold) {
        out.pairs.push_back({gt[i].id, hyp[j].id, iou});
        gt_used[i] = hyp_used[j] = 1;
      }
      break;
    }
  }

  std::vector<std::size_t> gi, hj;
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (!gt_used[i]) gi.push_back(i);
  for (std::size_t j = 0; j < hyp.size(); ++j)
    if (!hyp_used[j]) hj.push_back(j);
  if (gi.empty() || hj.empty()) return out;

  std::vector<double> iou(gi.size() * hj.size());
  for (std::size_t a = 0; a < gi.size(); ++a) {
    for (std::size_t b = 0; b < hj.size(); ++b) {
      const double v = bev_iou(gt[gi[a]].box, hyp[hj[b]].box);
      iou[a * hj.size() + b] = v > iou_threshold ? v : 0.0;
    }
  }
  const bool rows_are_gt = gi.size() <= hj.size();
  const int rows = static_cast<int>(rows_are_gt ? gi.size() : hj.size());
  const int cols = static_cast<int>(rows_are_gt ? hj.size() : gi.size());
  const auto assignment = solve_assignment<double>(rows, cols, [&](int r, int c) {
    return rows_are_gt ? -iou[static_cast<std::size_t>(r) * hj.size() + static_cast<std::size_t>(c)]
                       : -iou[static_cast<std::size_t>(c) * hj.size() + static_cast<std::size_t>(r)];
  });
  for (int r = 0; r < rows; ++r) {
    const auto a = static_cast<std::size_t>(rows_are_gt ? r : assignment[static_cast<std::size_t>(r)]);
    const auto b = static_cast<std::size_t>(rows_are_gt ? assignment[static_cast<std::size_t>(r)] : r);
    const double v = iou[a * hj.size() + b];
    if (v > 0.0) out.pairs.push_back({gt[gi[a]].id, hyp[hj[b]].id, v});
  }
  return out;
}

struct MotReport {
  long long gt_total = 0;
  long long hyp_total = 0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long idsw = 0;
  long long frag = 0;
  double iou_sum = 0.0;
  long long trajectories = 0;
  long long mt = 0;
  long long pt = 0;
  long long ml = 0;

  // No ground truth: MOTA is undefined and reported as 1.
  bool mota_undefined() const { return gt_total == 0; }
  double mota() const {
    if (gt_total == 0) return 1.0;
    return 1.0 - static_cast<double>(fp + fn + idsw) / static_cast<double>(gt_total);
  }
  double motp() const { return tp == 0 ? 0.0 : iou_sum / static_cast<double>(tp); }
  double ratio(long long n) const {
    return trajectories == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(trajectories);
  }
  double mt_ratio() const { return ratio(mt); }
  double pt_ratio() const { return ratio(pt); }
  double ml_ratio() const { return ratio(ml); }

  MotReport& operator+=(const MotReport& o) {
    gt_total += o.gt_total;
    hyp_total += o.hyp_total;
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    idsw += o.idsw;
    frag += o.frag;
    iou_sum += o.iou_sum;
    trajectories += o.trajectories;
    mt += o.mt;
    pt += o.pt;
    ml += o.ml;
    return *this;
  }
};

inline MotReport accumulate(std::span<const FrameMatch> frames, const EvalConfig& cfg = {}) {
  struct GtHistory {
    int present = 0;
    int matched = 0;
    std::optional<int> last_hyp;
    bool matched_prev = false;
  };
  std::map<int, GtHistory> hist;
  MotReport r;

  for (const FrameMatch& f : frames) {
    r.gt_total += static_cast<long long>(f.gt_ids.size());
    r.hyp_total += f.num_hyp;
    r.tp += static_cast<long long>(f.pairs.size());
    r.fp += f.num_hyp - static_cast<long long>(f.pairs.size());
    r.fn += static_cast<long long>(f.gt_ids.size() - f.pairs.size());
    const Correspondence c = f.correspondence();
    for (const auto& p : f.pairs) r.iou_sum += p.iou;

    for (int g : f.gt_ids) {
      GtHistory& h = hist[g];
      h.present += 1;
      const auto it = c.find(g);
      if (it == c.end()) {
        h.matched_prev = false;
        continue;
      }
      h.matched += 1;
      if (h.last_hyp && *h.last_hyp != it->second) ++r.idsw;
      if (h.last_hyp && !h.matched_prev) ++r.frag;
      h.last_hyp = it->second;
      h.matched_prev = true;
    }
  }

  for (const auto& [id, h] : hist) {
    ++r.trajectories;
    const double frac = static_cast<double>(h.matched) / static_cast<double>(h.present);
    if (frac >= cfg.mostly_tracked) {
      ++r.mt;
    } else if (frac <= cfg.mostly_lost) {
      ++r.ml;
    } else {
      ++r.pt;
    }
  }
  return r;
}

// Evaluates one sequence. Labels with a negative id ("DontCare") are skipped.
inline MotReport evaluate_sequence(const std::vector<LabelRecord>& gt, const std::vector<LabelRecord>& hyp,
                                   const EvalConfig& cfg = {}) {
  std::map<int, std::vector<LabeledBox>> gt_by_frame, hyp_by_frame;
  std::map<int, char> frames;
  for (const auto& l : gt) {
    if (l.track_id < 0) continue;
    if (cfg.max_occluded && l.occluded > *cfg.max_occluded) continue;
    gt_by_frame[l.frame].push_back({l.track_id, l.box});
    frames[l.frame] = 1;
  }
  for (const auto& l : hyp) {
    if (l.track_id < 0) continue;
    hyp_by_frame[l.frame].push_back({l.track_id, l.box});
    frames[l.frame] = 1;
  }
  std::vector<FrameMatch> matches;
  Correspondence prev;
  const std::vector<LabeledBox> none;
  for (const auto& [frame, _] : frames) {
    const auto g = gt_by_frame.find(frame);
    const auto h = hyp_by_frame.find(frame);
    matches.push_back(match_frame(g == gt_by_frame.end() ? none : g->second,
                                  h == hyp_by_frame.end() ? none : h->second, prev, cfg.iou_threshold));
    for (const auto& p : matches.back().pairs) prev[p.gt] = p.hyp;
  }
  return accumulate(matches, cfg);
}

inline nlohmann::ordered_json to_json(const MotReport& r) {
  nlohmann::ordered_json j;
  j["MOTA"] = r.mota();
  j["MOTA_undefined"] = r.mota_undefined();
  j["MOTP"] = r.motp();
  j["FP"] = r.fp;
  j["FN"] = r.fn;
  j["IDSW"] = r.idsw;
  j["FRAG"] = r.frag;
  j["MT"] = r.mt_ratio();
  j["PT"] = r.pt_ratio();
  j["ML"] = r.ml_ratio();
  j["TP"] = r.tp;
  j["GT"] = r.gt_total;
  j["trajectories"] = r.trajectories;
  return j;
}

// Aligned plain-text table; one row per named report.
inline std::string format_table(const std::vector<std::pair<std::string, MotReport>>& rows) {
  std::size_t name_w = 8;
  for (const auto& [name, _] : rows) name_w = std::max(name_w, name.size());
  std::ostringstream os;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  auto pct = [](double v) { return text::fixed(100.0 * v, 2) + "%"; };
  std::string head = "sequence";
  head.resize(name_w, ' ');
  os << head;
  for (const char* h : {"MOTA", "MOTP", "FP", "FN", "IDSW", "FRAG", "MT", "PT", "ML"}) os << pad(h, 10);
  os << '\n';
  for (const auto& [name, r] : rows) {
    std::string n = name;
    n.resize(name_w, ' ');
    os << n << pad(pct(r.mota()), 10) << pad(pct(r.motp()), 10) << pad(std::to_string(r.fp), 10)
       << pad(std::to_string(r.fn), 10) << pad(std::to_string(r.idsw), 10) << pad(std::to_string(r.frag), 10)
       << pad(pct(r.mt_ratio()), 10) << pad(pct(r.pt_ratio()), 10) << pad(pct(r.ml_ratio()), 10) << '\n';
  }
  return os.str();
}

// Converts tracker output into label records for evaluation.
inline std::vector<LabelRecord> to_labels(const std::vector<FrameResult>& results) {
  std::vector<LabelRecord> out;
  for (const auto& fr : results) {
    for (const auto& t : fr.tracks) {
      LabelRecord l;
      l.frame = fr.frame;
      l.track_id = t.id;
      l.box = t.box;
      l.score = t.score;
      out.push_back(l);
    }
  }
  return out;
}

}  // namespace mipmot
