#include "graspmap/episode_log.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "graspmap/error.hpp"

namespace graspmap {

using json = nlohmann::ordered_json;

namespace {

json vec3_json(const Eigen::Vector3d& v) { return json{v.x(), v.y(), v.z()}; }

json vecx_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::Vector3d vec3_from(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3)
    fail(ErrorCode::parse, std::string("log record: expected 3-array '") + key + "'");
  const auto& a = j[key];
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Eigen::VectorXd vecx_from(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    fail(ErrorCode::parse, std::string("log record: expected array '") + key + "'");
  const auto& a = j[key];
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

}  // namespace

const LogRecord& EpisodeLog::final_record() const {
  if (records.empty()) fail(ErrorCode::empty_input, "episode log has no records");
  return records.back();
}

Eigen::VectorXd EpisodeLog::theta_final() const {
  return final_record().hand.joints;
}

void EpisodeLog::validate() const {
  if (records.empty()) fail(ErrorCode::empty_input, "episode log has no records");
  const auto dof = records.front().hand.joints.size();
  const auto tip_count = records.front().tips.size();
  int prev_t = records.front().t - 1;
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.t <= prev_t)
      fail(ErrorCode::validation,
           "episode log: timesteps not strictly increasing at record " +
               std::to_string(i));
    prev_t = r.t;
    if (r.hand.joints.size() != dof)
      fail(ErrorCode::dimension_mismatch,
           "episode log: joint dimension changes at record " + std::to_string(i));
    if (r.tips.size() != tip_count)
      fail(ErrorCode::dimension_mismatch,
           "episode log: fingertip count changes at record " + std::to_string(i));
    if (!r.tip_contact.empty() && r.tip_contact.size() != r.tips.size())
      fail(ErrorCode::dimension_mismatch,
           "episode log: tip_contact length mismatch at record " +
               std::to_string(i));
    if (r.has_reference && r.reference.joints.size() != dof)
      fail(ErrorCode::dimension_mismatch,
           "episode log: reference joint dimension mismatch at record " +
               std::to_string(i));
  }
}

std::string record_to_json(const LogRecord& rec, const std::string& intent_id) {
  json j;
  j["t"] = rec.t;
  if (!intent_id.empty()) j["intent_id"] = intent_id;
  j["object"] = vec3_json(rec.object_pos);
  j["goal"] = vec3_json(rec.goal_pos);
  j["w"] = vec3_json(rec.hand.wrist_pos);
  j["phi"] = vec3_json(rec.hand.wrist_rot);
  j["theta"] = vecx_json(rec.hand.joints);
  json tips = json::array();
  for (const auto& p : rec.tips) tips.push_back(vec3_json(p));
  j["tips"] = tips;
  if (!rec.tip_contact.empty()) {
    json flags = json::array();
    for (bool b : rec.tip_contact) flags.push_back(b);
    j["tip_contact"] = flags;
  }
  if (rec.has_reference) {
    j["ref_w"] = vec3_json(rec.reference.wrist_pos);
    j["ref_phi"] = vec3_json(rec.reference.wrist_rot);
    j["ref_theta"] = vecx_json(rec.reference.joints);
  }
  return j.dump();
}

LogRecord record_from_json(const std::string& text, std::string* intent_id_out) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, std::string("log record: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::parse, "log record: not an object");
  if (!j.contains("t") || !j["t"].is_number_integer())
    fail(ErrorCode::parse, "log record: missing integer 't'");

  LogRecord rec;
  rec.t = j["t"].get<int>();
  rec.object_pos = vec3_from(j, "object");
  rec.goal_pos = vec3_from(j, "goal");
  rec.hand.wrist_pos = vec3_from(j, "w");
  rec.hand.wrist_rot = vec3_from(j, "phi");
  rec.hand.joints = vecx_from(j, "theta");
  if (!j.contains("tips") || !j["tips"].is_array())
    fail(ErrorCode::parse, "log record: expected array 'tips'");
  for (const auto& tip : j["tips"]) {
    if (!tip.is_array() || tip.size() != 3)
      fail(ErrorCode::parse, "log record: each tip must be a 3-array");
    rec.tips.emplace_back(tip[0].get<double>(), tip[1].get<double>(),
                          tip[2].get<double>());
  }
  if (j.contains("tip_contact")) {
    for (const auto& b : j["tip_contact"]) rec.tip_contact.push_back(b.get<bool>());
  }
  const bool any_ref =
      j.contains("ref_w") || j.contains("ref_phi") || j.contains("ref_theta");
  if (any_ref) {
    if (!(j.contains("ref_w") && j.contains("ref_phi") && j.contains("ref_theta")))
      fail(ErrorCode::parse,
           "log record: reference state requires ref_w, ref_phi, and ref_theta");
    rec.has_reference = true;
    rec.reference.wrist_pos = vec3_from(j, "ref_w");
    rec.reference.wrist_rot = vec3_from(j, "ref_phi");
    rec.reference.joints = vecx_from(j, "ref_theta");
  }
  if (intent_id_out && j.contains("intent_id"))
    *intent_id_out = j["intent_id"].get<std::string>();
  return rec;
}

EpisodeLog read_episode_log(std::istream& in) {
  EpisodeLog log;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::string intent;
    LogRecord rec;
    try {
      rec = record_from_json(line, &intent);
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!intent.empty()) {
      if (!log.intent_id.empty() && log.intent_id != intent)
        fail(ErrorCode::parse,
             "line " + std::to_string(line_no) + ": conflicting intent_id '" +
                 intent + "' vs '" + log.intent_id + "'");
      log.intent_id = intent;
    }
    log.records.push_back(std::move(rec));
  }
  log.validate();
  return log;
}

EpisodeLog load_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open episode log: " + path);
  try {
    return read_episode_log(in);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

void write_episode_log(const EpisodeLog& log, std::ostream& out) {
  for (const auto& rec : log.records)
    out << record_to_json(rec, log.intent_id) << '\n';
}

void save_episode_log(const EpisodeLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write episode log: " + path);
  write_episode_log(log, out);
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

SimStateSnapshot snapshot_from_record(const LogRecord& rec) {
  if (!rec.has_reference)
    fail(ErrorCode::invalid_argument,
         "snapshot_from_record: record carries no reference state");
  SimStateSnapshot s;
  s.timestep = rec.t;
  s.hand = rec.hand;
  s.fingertips = rec.tips;
  s.object_pos = rec.object_pos;
  s.goal_pos = rec.goal_pos;
  s.reference = rec.reference;
  return s;
}

}  // namespace graspmap
