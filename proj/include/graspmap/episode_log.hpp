#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graspmap/kinematics.hpp"
#include "graspmap/reward.hpp"

namespace graspmap {

// One line of an episode log.  tip_contact and the reference state are
// optional; absent fields stay empty / has_reference=false.
struct LogRecord {
  int t = 0;
  Eigen::Vector3d object_pos = Eigen::Vector3d::Zero();
  Eigen::Vector3d goal_pos = Eigen::Vector3d::Zero();
  HandConfiguration hand;
  std::vector<Eigen::Vector3d> tips;
  std::vector<bool> tip_contact;  // empty when the logger did not flag contacts
  bool has_reference = false;
  HandConfiguration reference;
};

// A whole episode: line-delimited records in timestep order.
struct EpisodeLog {
  std::string intent_id;  // empty when the log does not name one
  std::vector<LogRecord> records;

  const LogRecord& final_record() const;
  Eigen::VectorXd theta_final() const;

  // Non-empty, strictly increasing t, consistent joint/tip dimensions,
  // tip_contact size matching tips where present.
  void validate() const;
};

std::string record_to_json(const LogRecord& rec, const std::string& intent_id);
LogRecord record_from_json(const std::string& text, std::string* intent_id_out);

EpisodeLog read_episode_log(std::istream& in);
EpisodeLog load_episode_log(const std::string& path);
void write_episode_log(const EpisodeLog& log, std::ostream& out);
void save_episode_log(const EpisodeLog& log, const std::string& path);

// Reward-ready view of one record; requires the record to carry a reference
// state.
SimStateSnapshot snapshot_from_record(const LogRecord& rec);

}  // namespace graspmap
