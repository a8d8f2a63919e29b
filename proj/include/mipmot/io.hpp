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

// Text formats.
//
// Detections, plain variant: one record per line,
//
//   frame x y z l w h a score [start_prob] [[e0 e1 ... ]]
//
// where the optional embedding is a bracketed list separated by spaces or
// commas. Structured variant: JSON lines of the form
//
//   {"frame": 0, "box": [x, y, z, l, w, h, a], "score": 0.9,
//    "start_prob": 0.5, "embedding": [...]}
//
// with start_prob and embedding optional. The variant is picked from the
// first non-blank character of the file ('{' selects JSON lines). Blank lines
// and lines starting with '#' are ignored in both.
//
// Tracking results and labels use the KITTI tracking layout:
//
//   frame id type truncated occluded alpha x1 y1 x2 y2 h w l x y z rotation_y [score]
//
// Image-plane fields are not computed here and are written as the sentinels
// truncated = -1, occluded = -1, alpha = -10, bbox = -1 -1 -1 -1. The
// location columns carry the world-frame box center.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mipmot/detection.hpp"
#include "mipmot/error.hpp"
#include "mipmot/geometry.hpp"
#include "mipmot/tracker.hpp"

namespace mipmot {

struct DetectionRecord {
  int frame = 0;
  Detection detection;

  bool operator==(const DetectionRecord&) const = default;
};

using FrameDetections = std::map<int, std::vector<Detection>>;

struct LabelRecord {
  int frame = 0;
  int track_id = 0;
  std::string type = "Car";
  double truncated = 0.0;
  int occluded = 0;
  Box3D box;
  std::optional<double> score;
};

enum class DetectionFormat { Plain, JsonLines };

namespace text {

// Shortest representation that parses back to the same double.
inline std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fixed(double v, int precision = 6) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  std::string s(buf, res.ptr);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

}  // namespace text

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, std::string_view seps = " \t\r") {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = s.find_first_not_of(seps, i);
    if (b == std::string_view::npos) break;
    auto e = s.find_first_of(seps, b);
    if (e == std::string_view::npos) e = s.size();
    out.push_back(s.substr(b, e - b));
    i = e;
  }
  return out;
}

// Locale-independent number parsing; rejects trailing garbage and NaN/Inf.
inline std::optional<double> parse_double(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<int> parse_int(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Next non-blank, non-comment line.
  bool next(std::string_view& line) {
    while (std::getline(in_, buf_)) {
      ++line_no_;
      line = trim(buf_);
      if (line.empty() || line.front() == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

  double number(std::string_view tok, const char* field) const {
    const auto v = parse_double(tok);
    if (!v) fail(std::string("bad number for ") + field + ": '" + std::string(tok) + "'");
    return *v;
  }

  int integer(std::string_view tok, const char* field) const {
    const auto v = parse_int(tok);
    if (!v) fail(std::string("bad integer for ") + field + ": '" + std::string(tok) + "'");
    return *v;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string source_;
  std::string buf_;
  std::size_t line_no_ = 0;
};

inline Detection checked(const LineReader& r, Detection d) {
  try {
    validate(d);
  } catch (const InvalidInput& e) {
    r.fail(e.what());
  }
  return d;
}

inline DetectionRecord parse_plain_detection(const LineReader& r, std::string_view line) {
  std::optional<Embedding> embedding;
  const auto open = line.find('[');
  if (open != std::string_view::npos) {
    const auto close = line.find(']', open);
    if (close == std::string_view::npos || !trim(line.substr(close + 1)).empty()) {
      r.fail("embedding must be a trailing bracketed list");
    }
    Embedding e;
    for (auto tok : split(line.substr(open + 1, close - open - 1), " \t\r,")) e.push_back(r.number(tok, "embedding"));
    embedding = std::move(e);
    line = line.substr(0, open);
  }
  const auto toks = split(line);
  if (toks.size() != 9 && toks.size() != 10) {
    r.fail("expected 9 or 10 fields before the embedding, got " + std::to_string(toks.size()));
  }
  DetectionRecord rec;
  rec.frame = r.integer(toks[0], "frame");
  if (rec.frame < 0) r.fail("frame must be >= 0");
  Box3D& b = rec.detection.box;
  b.x = r.number(toks[1], "x");
  b.y = r.number(toks[2], "y");
  b.z = r.number(toks[3], "z");
  b.l = r.number(toks[4], "l");
  b.w = r.number(toks[5], "w");
  b.h = r.number(toks[6], "h");
  b.a = r.number(toks[7], "a");
  rec.detection.score = r.number(toks[8], "score");
  if (toks.size() == 10) rec.detection.start_prob = r.number(toks[9], "start_prob");
  rec.detection.embedding = std::move(embedding);
  rec.detection = checked(r, std::move(rec.detection));
  return rec;
}

inline DetectionRecord parse_json_detection(const LineReader& r, std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    r.fail(std::string("invalid JSON: ") + e.what());
  }
  auto num = [&](const nlohmann::json& v, const char* field) {
    if (!v.is_number()) r.fail(std::string("field '") + field + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) r.fail(std::string("field '") + field + "' is not finite");
    return d;
  };
  if (!j.is_object() || !j.contains("frame") || !j.contains("box") || !j.contains("score")) {
    r.fail("record needs 'frame', 'box' and 'score'");
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "frame" && key != "box" && key != "score" && key != "start_prob" && key != "embedding") {
      r.fail("unknown field '" + key + "'");
    }
  }
  DetectionRecord rec;
  if (!j["frame"].is_number_integer() || j["frame"].get<long long>() < 0) r.fail("'frame' must be an integer >= 0");
  rec.frame = j["frame"].get<int>();
  const auto& box = j["box"];
  if (!box.is_array() || box.size() != 7) r.fail("'box' must be [x, y, z, l, w, h, a]");
  Box3D& b = rec.detection.box;
  b = {num(box[0], "box"), num(box[1], "box"), num(box[2], "box"), num(box[3], "box"),
       num(box[4], "box"), num(box[5], "box"), num(box[6], "box")};
  rec.detection.score = num(j["score"], "score");
  if (j.contains("start_prob") && !j["start_prob"].is_null()) rec.detection.start_prob = num(j["start_prob"], "start_prob");
  if (j.contains("embedding") && !j["embedding"].is_null()) {
    if (!j["embedding"].is_array()) r.fail("'embedding' must be an array");
    Embedding e;
    for (const auto& v : j["embedding"]) e.push_back(num(v, "embedding"));
    rec.detection.embedding = std::move(e);
  }
  rec.detection = checked(r, std::move(rec.detection));
  return rec;
}

}  // namespace detail

inline std::vector<DetectionRecord> parse_detection_records(std::istream& in, const std::string& source = "<input>") {
  detail::LineReader reader(in, source);
  std::vector<DetectionRecord> out;
  std::string_view line;
  std::optional<DetectionFormat> format;
  while (reader.next(line)) {
    if (!format) format = line.front() == '{' ? DetectionFormat::JsonLines : DetectionFormat::Plain;
    out.push_back(*format == DetectionFormat::JsonLines ? detail::parse_json_detection(reader, line)
                                                        : detail::parse_plain_detection(reader, line));
  }
  return out;
}

// Groups records by frame; ascending frames, file order within a frame.
inline FrameDetections group_by_frame(const std::vector<DetectionRecord>& records) {
  FrameDetections out;
  for (const auto& r : records) out[r.frame].push_back(r.detection);
  return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

inline FrameDetections read_detections(const std::filesystem::path& path) {
  auto in = open_input(path);
  return group_by_frame(parse_detection_records(in, path.string()));
}

inline void write_detection_records(std::ostream& out, const std::vector<DetectionRecord>& records,
                                    DetectionFormat format = DetectionFormat::Plain) {
  for (const auto& rec : records) {
    const Detection& d = rec.detection;
    const Box3D& b = d.box;
    if (format == DetectionFormat::JsonLines) {
      nlohmann::ordered_json j;
      j["frame"] = rec.frame;
      j["box"] = {b.x, b.y, b.z, b.l, b.w, b.h, b.a};
      j["score"] = d.score;
      if (d.start_prob) j["start_prob"] = *d.start_prob;
      if (d.embedding) j["embedding"] = *d.embedding;
      out << j.dump() << '\n';
      continue;
    }
    out << rec.frame;
    for (double v : {b.x, b.y, b.z, b.l, b.w, b.h, b.a, d.score}) out << ' ' << text::shortest(v);
    if (d.start_prob) out << ' ' << text::shortest(*d.start_prob);
    if (d.embedding) {
      out << " [";
      for (std::size_t i = 0; i < d.embedding->size(); ++i) {
        if (i) out << ' ';
        out << text::shortest((*d.embedding)[i]);
      }
      out << ']';
    }
    out << '\n';
  }
}

inline std::vector<LabelRecord> parse_labels(std::istream& in, const std::string& source = "<labels>") {
  detail::LineReader reader(in, source);
  std::vector<LabelRecord> out;
  std::string_view line;
  while (reader.next(line)) {
    const auto t = detail::split(line);
    if (t.size() != 17 && t.size() != 18) {
      reader.fail("expected 17 or 18 KITTI tracking fields, got " + std::to_string(t.size()));
    }
    LabelRecord r;
    r.frame = reader.integer(t[0], "frame");
    r.track_id = reader.integer(t[1], "track_id");
    r.type = std::string(t[2]);
    r.truncated = reader.number(t[3], "truncated");
    r.occluded = reader.integer(t[4], "occluded");
    // t[5] alpha, t[6..9] image bbox: not used.
    r.box.h = reader.number(t[10], "h");
    r.box.w = reader.number(t[11], "w");
    r.box.l = reader.number(t[12], "l");
    r.box.x = reader.number(t[13], "x");
    r.box.y = reader.number(t[14], "y");
    r.box.z = reader.number(t[15], "z");
    r.box.a = reader.number(t[16], "rotation_y");
    if (t.size() == 18) r.score = reader.number(t[17], "score");
    if (r.frame < 0) reader.fail("frame must be >= 0");
    try {
      validate(r.box);
    } catch (const InvalidInput& e) {
      reader.fail(e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<LabelRecord> read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_labels(in, path.string());
}

namespace detail {
inline void write_kitti_line(std::ostream& out, int frame, int id, const std::string& type, const Box3D& b,
                             std::optional<double> score, double truncated = -1.0, int occluded = -1) {
  out << frame << ' ' << id << ' ' << type << ' ' << text::shortest(truncated) << ' ' << occluded
      << " -10 -1 -1 -1 -1";
  for (double v : {b.h, b.w, b.l, b.x, b.y, b.z, b.a}) out << ' ' << text::fixed(v);
  if (score) out << ' ' << text::fixed(*score);
  out << '\n';
}
}  // namespace detail

// 18 fields per line. Throws InvalidInput on a repeated (frame, id) pair.
inline void write_kitti_tracking(std::ostream& out, const std::vector<FrameResult>& results,
                                 const std::string& type = "Car") {
  std::set<std::pair<int, int>> seen;
  for (const FrameResult& fr : results) {
    for (const TrackOutput& t : fr.tracks) {
      if (!seen.emplace(fr.frame, t.id).second) {
        throw InvalidInput("duplicate (frame, id) = (" + std::to_string(fr.frame) + ", " + std::to_string(t.id) + ")");
      }
      detail::write_kitti_line(out, fr.frame, t.id, type, t.box, t.score);
    }
  }
}

inline void write_kitti_tracking(const std::filesystem::path& path, const std::vector<FrameResult>& results,
                                 const std::string& type = "Car") {
  std::ostringstream buf;
  write_kitti_tracking(buf, results, type);
  auto out = open_output(path);
  out << buf.str();
}

// Ground-truth labels, 17 fields per line (18 when a score is present).
inline void write_labels(std::ostream& out, const std::vector<LabelRecord>& labels) {
  for (const LabelRecord& l : labels) detail::write_kitti_line(out, l.frame, l.track_id, l.type, l.box, l.score, l.truncated, l.occluded);
}

// Sequence names (file stems) of the *.txt files in `dir`, sorted.
inline std::vector<std::string> list_sequences(const std::filesystem::path& dir) {
  std::vector<std::string> out;
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("not a directory: '" + dir.string() + "'");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mipmot
