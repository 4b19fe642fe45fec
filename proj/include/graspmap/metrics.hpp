#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graspmap/episode_log.hpp"
#include "graspmap/mesh_query.hpp"
#include "graspmap/refine.hpp"

namespace graspmap {

using geom::MeshQuery;

enum class SadAggregation { mean, min };

struct MetricsConfig {
  double success_radius = 0.05;  // m, strict comparison
  int success_hold = 20;         // consecutive steps within the radius
  SadAggregation sad_aggregation = SadAggregation::mean;
  double isr_threshold = 0.04;   // m, strict comparison
  // Used to derive contact flags when a log does not carry tip_contact.
  double contact_threshold = 0.01;
  std::vector<double> coverage_taus = {0.002, 0.005};  // m

  void validate() const;
};

// True iff some run of `hold` consecutive records keeps the object strictly
// within `radius` of the goal.
bool episode_success(const EpisodeLog& log, double radius = 0.05, int hold = 20);

// Fraction of successful episodes.
double gsr(const std::vector<EpisodeLog>& logs, double radius = 0.05,
           int hold = 20);

// Aggregated point-to-set distance from the final record's contacting
// fingertips to the map.  Contacts are the flagged tips when the log carries
// tip_contact, otherwise tips within contact_threshold of the map.
double sad(const EpisodeLog& log, const ContactMap& map,
           SadAggregation aggregation = SadAggregation::mean,
           double contact_threshold = 0.01);

// Mean sad over successful episodes; empty when none succeed.  maps is
// parallel to logs.
std::optional<double> msad(const std::vector<EpisodeLog>& logs,
                           const std::vector<ContactMap>& maps,
                           const MetricsConfig& cfg);

// Fraction of all episodes that both succeed and keep sad strictly below the
// threshold.
double isr(const std::vector<EpisodeLog>& logs,
           const std::vector<ContactMap>& maps, const MetricsConfig& cfg);

// Mean pairwise L2 distance among the final joint vectors of successful
// episodes; needs at least two successes.
double style_diversity(const std::vector<EpisodeLog>& logs,
                       double radius = 0.05, int hold = 20);

// Percentage of points whose unsigned distance-to-surface is at most tau.
double coverage(const std::vector<Eigen::Vector3d>& points,
                const MeshQuery& object, double tau);

struct CoverageEntry {
  double tau = 0;
  double percent = 0;
};

struct EvalReport {
  int episodes = 0;
  int successes = 0;
  double gsr = 0;
  std::optional<double> msad;
  double isr = 0;
  std::optional<double> style_diversity;
  std::vector<CoverageEntry> coverage;  // empty when no object mesh was given
  bool coverage_computed = false;
  MetricsConfig config;
};

// Full metric sweep.  maps is parallel to logs; object (optional) enables the
// coverage entries, computed over every episode's final fingertip positions.
EvalReport evaluate(const std::vector<EpisodeLog>& logs,
                    const std::vector<ContactMap>& maps,
                    const MetricsConfig& cfg, const MeshQuery* object = nullptr);

std::string report_to_json(const EvalReport& report);

}  // namespace graspmap
