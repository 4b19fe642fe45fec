#include "graspmap/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "graspmap/error.hpp"

namespace graspmap {

using json = nlohmann::ordered_json;

void MetricsConfig::validate() const {
  if (success_radius <= 0)
    fail(ErrorCode::validation, "metrics: success_radius must be > 0");
  if (success_hold < 1)
    fail(ErrorCode::validation, "metrics: success_hold must be >= 1");
  if (isr_threshold <= 0)
    fail(ErrorCode::validation, "metrics: isr_threshold must be > 0");
  if (contact_threshold < 0)
    fail(ErrorCode::validation, "metrics: contact_threshold must be >= 0");
  for (double tau : coverage_taus)
    if (tau <= 0) fail(ErrorCode::validation, "metrics: coverage tau must be > 0");
}

bool episode_success(const EpisodeLog& log, double radius, int hold) {
  if (log.records.empty())
    fail(ErrorCode::empty_input, "episode_success: empty log");
  if (hold < 1) fail(ErrorCode::invalid_argument, "episode_success: hold < 1");
  int run = 0;
  for (const auto& rec : log.records) {
    if ((rec.object_pos - rec.goal_pos).norm() < radius) {
      if (++run >= hold) return true;
    } else {
      run = 0;
    }
  }
  return false;
}

double gsr(const std::vector<EpisodeLog>& logs, double radius, int hold) {
  if (logs.empty()) fail(ErrorCode::empty_input, "gsr: no episodes");
  int wins = 0;
  for (const auto& log : logs)
    if (episode_success(log, radius, hold)) ++wins;
  return static_cast<double>(wins) / static_cast<double>(logs.size());
}

namespace {

double point_to_map(const Eigen::Vector3d& p, const ContactMap& map) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : map.points) best = std::min(best, (p - q).squaredNorm());
  return std::sqrt(best);
}

// Distances from each contacting fingertip of the final record to the map.
std::vector<double> contact_distances(const EpisodeLog& log,
                                      const ContactMap& map,
                                      double contact_threshold) {
  if (map.points.empty())
    fail(ErrorCode::assignment, "sad: empty contact map");
  const LogRecord& last = log.final_record();
  std::vector<double> out;
  for (size_t i = 0; i < last.tips.size(); ++i) {
    const double d = point_to_map(last.tips[i], map);
    const bool flagged = last.tip_contact.empty() ? d <= contact_threshold
                                                  : bool(last.tip_contact[i]);
    if (flagged) out.push_back(d);
  }
  return out;
}

}  // namespace

double sad(const EpisodeLog& log, const ContactMap& map,
           SadAggregation aggregation, double contact_threshold) {
  const auto dists = contact_distances(log, map, contact_threshold);
  if (dists.empty())
    fail(ErrorCode::missing_contact, "sad: no fingertip contacts recorded");
  if (aggregation == SadAggregation::min)
    return *std::min_element(dists.begin(), dists.end());
  double sum = 0;
  for (double d : dists) sum += d;
  return sum / static_cast<double>(dists.size());
}

namespace {

void check_parallel(const std::vector<EpisodeLog>& logs,
                    const std::vector<ContactMap>& maps) {
  if (logs.empty()) fail(ErrorCode::empty_input, "no episodes");
  if (logs.size() != maps.size())
    fail(ErrorCode::dimension_mismatch,
         "episode count != contact map count (" + std::to_string(logs.size()) +
             " vs " + std::to_string(maps.size()) + ")");
}

}  // namespace

std::optional<double> msad(const std::vector<EpisodeLog>& logs,
                           const std::vector<ContactMap>& maps,
                           const MetricsConfig& cfg) {
  check_parallel(logs, maps);
  double sum = 0;
  int n = 0;
  for (size_t i = 0; i < logs.size(); ++i) {
    if (!episode_success(logs[i], cfg.success_radius, cfg.success_hold)) continue;
    sum += sad(logs[i], maps[i], cfg.sad_aggregation, cfg.contact_threshold);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

double isr(const std::vector<EpisodeLog>& logs,
           const std::vector<ContactMap>& maps, const MetricsConfig& cfg) {
  check_parallel(logs, maps);
  int wins = 0;
  for (size_t i = 0; i < logs.size(); ++i) {
    if (!episode_success(logs[i], cfg.success_radius, cfg.success_hold)) continue;
    const double d = sad(logs[i], maps[i], cfg.sad_aggregation,
                         cfg.contact_threshold);
    if (d < cfg.isr_threshold) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(logs.size());
}

double style_diversity(const std::vector<EpisodeLog>& logs, double radius,
                       int hold) {
  std::vector<Eigen::VectorXd> finals;
  for (const auto& log : logs)
    if (episode_success(log, radius, hold)) finals.push_back(log.theta_final());
  if (finals.size() < 2)
    fail(ErrorCode::insufficient_data,
         "style_diversity: needs >= 2 successful episodes, have " +
             std::to_string(finals.size()));
  for (const auto& v : finals)
    if (v.size() != finals.front().size())
      fail(ErrorCode::dimension_mismatch,
           "style_diversity: mixed joint dimensions");
  double sum = 0;
  size_t pairs = 0;
  for (size_t a = 0; a < finals.size(); ++a)
    for (size_t b = a + 1; b < finals.size(); ++b) {
      sum += (finals[a] - finals[b]).norm();
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

double coverage(const std::vector<Eigen::Vector3d>& points,
                const MeshQuery& object, double tau) {
  if (points.empty()) fail(ErrorCode::empty_input, "coverage: no points");
  if (tau < 0) fail(ErrorCode::invalid_argument, "coverage: negative tau");
  size_t inside = 0;
  for (const auto& p : points)
    if (std::abs(object.signed_distance(p)) <= tau) ++inside;
  return 100.0 * static_cast<double>(inside) / static_cast<double>(points.size());
}

EvalReport evaluate(const std::vector<EpisodeLog>& logs,
                    const std::vector<ContactMap>& maps,
                    const MetricsConfig& cfg, const MeshQuery* object) {
  cfg.validate();
  check_parallel(logs, maps);
  EvalReport report;
  report.config = cfg;
  report.episodes = static_cast<int>(logs.size());
  for (const auto& log : logs)
    if (episode_success(log, cfg.success_radius, cfg.success_hold))
      ++report.successes;
  report.gsr = static_cast<double>(report.successes) / report.episodes;
  report.msad = msad(logs, maps, cfg);
  report.isr = isr(logs, maps, cfg);
  if (report.successes >= 2)
    report.style_diversity =
        style_diversity(logs, cfg.success_radius, cfg.success_hold);
  if (object) {
    std::vector<Eigen::Vector3d> tips;
    for (const auto& log : logs)
      for (const auto& tip : log.final_record().tips) tips.push_back(tip);
    for (double tau : cfg.coverage_taus)
      report.coverage.push_back({tau, coverage(tips, *object, tau)});
    report.coverage_computed = true;
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  json j;
  j["episodes"] = report.episodes;
  j["successes"] = report.successes;
  j["gsr"] = report.gsr;
  j["msad"] = report.msad ? json(*report.msad) : json(nullptr);
  j["isr"] = report.isr;
  j["sd"] = report.style_diversity ? json(*report.style_diversity) : json(nullptr);
  if (report.coverage_computed) {
    json cov = json::array();
    for (const auto& entry : report.coverage)
      cov.push_back(json{{"tau", entry.tau}, {"percent", entry.percent}});
    j["coverage"] = cov;
  } else {
    j["coverage"] = nullptr;
  }
  json cfg;
  cfg["success_radius"] = report.config.success_radius;
  cfg["success_hold"] = report.config.success_hold;
  cfg["sad_aggregation"] =
      report.config.sad_aggregation == SadAggregation::min ? "min" : "mean";
  cfg["isr_threshold"] = report.config.isr_threshold;
  cfg["contact_threshold"] = report.config.contact_threshold;
  cfg["coverage_taus"] = report.config.coverage_taus;
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

}  // namespace graspmap
