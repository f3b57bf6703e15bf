#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgerecon/geometry.hpp"
#include "edgerecon/sampling.hpp"

namespace edgerecon {

inline constexpr std::size_t kMetricSamples = 10000;
inline constexpr double kFScoreThreshold = 0.001;

struct ChamferDistance {
  double l1 = 0.0;
  double l2 = 0.0;
};

// L1 = 0.5 * (mean_a d(a, B) + mean_b d(b, A)); L2 uses squared distances.
ChamferDistance chamfer(const std::vector<Point3>& recon, const std::vector<Point3>& gt);

/// Harmonic mean of precision (recon within tau of gt) and recall (gt within
/// tau of recon); 0 when both are 0.
double f_score(const std::vector<Point3>& recon, const std::vector<Point3>& gt, double tau = kFScoreThreshold);

/// Mean absolute cosine between each sample normal and the normal of its
/// nearest sample on the other surface, averaged over both directions.
double normal_consistency(const std::vector<SurfaceSample>& recon, const std::vector<SurfaceSample>& gt);
double normal_consistency(const TriMesh& recon, const TriMesh& gt, std::size_t count = kMetricSamples,
                          std::uint64_t seed = 0);

struct MetricReport {
  double l1_cd = 0.0;
  double l2_cd = 0.0;
  double f_score = 0.0;
  double normal_consistency = 0.0;
  std::size_t sample_count = kMetricSamples;
  double threshold = kFScoreThreshold;
  std::uint64_t seed = 0;

  std::string to_json() const;
  // Tab-separated: l1 l2 f nc samples threshold seed
  std::string to_tsv() const;
  static std::string tsv_header();
};

/// All metrics from one draw of `count` samples per mesh, both drawn with
/// `seed`. Throws std::invalid_argument when either mesh has no faces.
MetricReport evaluate(const TriMesh& recon, const TriMesh& gt, std::size_t count = kMetricSamples,
                      double tau = kFScoreThreshold, std::uint64_t seed = 0);

}  // namespace edgerecon
