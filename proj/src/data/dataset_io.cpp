// SPDX-License-Identifier: Apache-2.0
#include "mint/data/dataset_io.hpp"

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

namespace mint::data {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& field,
                       const std::string& why) {
  throw ValidationError(source + ":" + std::to_string(line) + ": field '" + field + "': " + why);
}

double number_at(const json& j, const std::string& source, std::size_t line,
                 const std::string& field) {
  if (!j.is_number()) fail(source, line, field, "expected a number");
  return j.get<double>();
}

FrameFeature parse_frame(const json& jf, const std::string& source, std::size_t line,
                         const std::string& where) {
  if (!jf.is_object()) fail(source, line, where, "expected an object");
  FrameFeature f;
  const auto pose = jf.find("pose");
  if (pose == jf.end() || !pose->is_array() || pose->size() != kKeypoints) {
    fail(source, line, where + ".pose", "expected 17 keypoints");
  }
  for (std::size_t k = 0; k < kKeypoints; ++k) {
    const auto& kp = (*pose)[k];
    const std::string field = where + ".pose[" + std::to_string(k) + "]";
    if (!kp.is_array() || kp.size() != 3) fail(source, line, field, "expected [x, y, c]");
    f.pose[k] = {number_at(kp[0], source, line, field), number_at(kp[1], source, line, field),
                 number_at(kp[2], source, line, field)};
  }
  const auto emo = jf.find("emotion");
  if (emo == jf.end() || !emo->is_array() || emo->size() != kEmotionDims) {
    fail(source, line, where + ".emotion", "expected 7 probabilities");
  }
  for (std::size_t e = 0; e < kEmotionDims; ++e) {
    f.emotion[e] = number_at((*emo)[e], source, line, where + ".emotion");
  }
  const auto label = jf.find("label");
  if (label == jf.end() || !label->is_number_integer()) {
    fail(source, line, where + ".label", "expected 0 or 1");
  }
  f.label = label->get<int>();
  if (auto err = check_frame(f)) fail(source, line, where, *err);
  return f;
}

SequenceRecord parse_record(const std::string& text, const std::string& source, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(source, line, "<record>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(source, line, "<record>", "expected an object");
  SequenceRecord r;
  const auto id = j.find("id");
  if (id == j.end() || !id->is_string()) fail(source, line, "id", "expected a string");
  r.id = id->get<std::string>();
  const auto env = j.find("env");
  if (env == j.end() || !env->is_number_integer()) fail(source, line, "env", "expected 1, 2 or 3");
  try {
    r.env = environment_from_int(env->get<int>());
  } catch (const ValidationError& e) {
    fail(source, line, "env", e.what());
  }
  const auto frames = j.find("frames");
  if (frames == j.end() || !frames->is_array()) fail(source, line, "frames", "expected an array");
  r.frames.reserve(frames->size());
  for (std::size_t i = 0; i < frames->size(); ++i) {
    r.frames.push_back(parse_frame((*frames)[i], source, line, "frames[" + std::to_string(i) + "]"));
  }
  return r;
}

json to_json(const SequenceRecord& r) {
  json frames = json::array();
  for (const auto& f : r.frames) {
    json pose = json::array();
    for (const auto& kp : f.pose) pose.push_back({kp.x, kp.y, kp.c});
    frames.push_back({{"pose", std::move(pose)}, {"emotion", f.emotion}, {"label", f.label}});
  }
  return {{"id", r.id}, {"env", to_int(r.env)}, {"frames", std::move(frames)}};
}

}  // namespace

std::vector<SequenceRecord> read_dataset(std::istream& in, const std::string& source) {
  std::vector<SequenceRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_record(line, source, number));
  }
  return records;
}

void write_dataset(const std::vector<SequenceRecord>& records, std::ostream& out) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<SequenceRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read dataset file " + path);
  return read_dataset(in, path);
}

void save_dataset(const std::vector<SequenceRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file " + path);
  write_dataset(records, out);
}

std::vector<SequenceRecord> windows_as_records(const std::vector<WindowSample>& windows,
                                               const std::string& prefix, Environment env) {
  std::vector<SequenceRecord> out;
  out.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    std::ostringstream id;
    id << prefix << '-' << std::setw(5) << std::setfill('0') << i;
    out.push_back({id.str(), env, windows[i].frames});
  }
  return out;
}

ClassBalance class_balance(const std::vector<SequenceRecord>& records) {
  ClassBalance b;
  b.sequences = records.size();
  for (const auto& r : records) {
    b.frames += r.frames.size();
    b.positive_frames += r.positive_frames();
  }
  return b;
}

}  // namespace mint::data
