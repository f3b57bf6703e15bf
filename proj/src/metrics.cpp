#include "edgerecon/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "edgerecon/spatial_index.hpp"

namespace edgerecon {

namespace {

std::vector<Neighbor> nearest_all(const std::vector<Point3>& queries, const std::vector<Point3>& targets) {
  const SpatialIndex index(targets);
  std::vector<Neighbor> out;
  out.reserve(queries.size());
  for (const Point3& q : queries) out.push_back(index.nearest(q));
  return out;
}

void require_samples(const std::vector<Point3>& a, const std::vector<Point3>& b, const char* who) {
  if (a.empty() || b.empty()) throw std::invalid_argument(std::string(who) + ": empty sample set");
}

double fraction_within(const std::vector<Neighbor>& nn, double tau) {
  std::size_t hit = 0;
  for (const Neighbor& n : nn) hit += n.distance < tau ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(nn.size());
}

double f_from(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

ChamferDistance chamfer(const std::vector<Point3>& recon, const std::vector<Point3>& gt) {
  require_samples(recon, gt, "chamfer");
  auto means = [](const std::vector<Neighbor>& nn) {
    double s1 = 0.0, s2 = 0.0;
    for (const Neighbor& n : nn) {
      s1 += n.distance;
      s2 += n.distance_sq;
    }
    const auto count = static_cast<double>(nn.size());
    return std::pair{s1 / count, s2 / count};
  };
  const auto [r1, r2] = means(nearest_all(recon, gt));
  const auto [g1, g2] = means(nearest_all(gt, recon));
  return ChamferDistance{0.5 * (r1 + g1), 0.5 * (r2 + g2)};
}

double f_score(const std::vector<Point3>& recon, const std::vector<Point3>& gt, double tau) {
  require_samples(recon, gt, "f_score");
  if (!(tau > 0.0)) throw std::invalid_argument("f_score: tau must be positive");
  return f_from(fraction_within(nearest_all(recon, gt), tau), fraction_within(nearest_all(gt, recon), tau));
}

double normal_consistency(const std::vector<SurfaceSample>& recon, const std::vector<SurfaceSample>& gt) {
  const auto rp = positions(recon);
  const auto gp = positions(gt);
  require_samples(rp, gp, "normal_consistency");
  auto directed = [](const std::vector<SurfaceSample>& from, const std::vector<SurfaceSample>& to,
                     const std::vector<Neighbor>& nn) {
    double sum = 0.0;
    for (std::size_t s = 0; s < from.size(); ++s) sum += std::abs(from[s].normal.dot(to[nn[s].index].normal));
    return sum / static_cast<double>(from.size());
  };
  return 0.5 * (directed(recon, gt, nearest_all(rp, gp)) + directed(gt, recon, nearest_all(gp, rp)));
}

double normal_consistency(const TriMesh& recon, const TriMesh& gt, std::size_t count, std::uint64_t seed) {
  if (recon.empty() || gt.empty()) throw std::invalid_argument("normal_consistency: mesh has no faces");
  return normal_consistency(sample_surface(recon, count, seed), sample_surface(gt, count, seed));
}

MetricReport evaluate(const TriMesh& recon, const TriMesh& gt, std::size_t count, double tau, std::uint64_t seed) {
  if (recon.empty()) throw std::invalid_argument("evaluate: reconstruction has no faces");
  if (gt.empty()) throw std::invalid_argument("evaluate: reference mesh has no faces");
  const auto rs = sample_surface(recon, count, seed);
  const auto gs = sample_surface(gt, count, seed);
  const auto rp = positions(rs);
  const auto gp = positions(gs);

  const auto r_to_g = nearest_all(rp, gp);
  const auto g_to_r = nearest_all(gp, rp);
  MetricReport report;
  report.sample_count = count;
  report.threshold = tau;
  report.seed = seed;

  double r1 = 0.0, r2 = 0.0, g1 = 0.0, g2 = 0.0, rn = 0.0, gn = 0.0;
  for (std::size_t s = 0; s < rs.size(); ++s) {
    r1 += r_to_g[s].distance;
    r2 += r_to_g[s].distance_sq;
    rn += std::abs(rs[s].normal.dot(gs[r_to_g[s].index].normal));
  }
  for (std::size_t s = 0; s < gs.size(); ++s) {
    g1 += g_to_r[s].distance;
    g2 += g_to_r[s].distance_sq;
    gn += std::abs(gs[s].normal.dot(rs[g_to_r[s].index].normal));
  }
  const auto nr = static_cast<double>(rs.size());
  const auto ng = static_cast<double>(gs.size());
  report.l1_cd = 0.5 * (r1 / nr + g1 / ng);
  report.l2_cd = 0.5 * (r2 / nr + g2 / ng);
  report.f_score = f_from(fraction_within(r_to_g, tau), fraction_within(g_to_r, tau));
  report.normal_consistency = 0.5 * (rn / nr + gn / ng);
  return report;
}

std::string MetricReport::to_json() const {
  nlohmann::json j = {{"l1_cd", l1_cd},
                      {"l2_cd", l2_cd},
                      {"f_score", f_score},
                      {"normal_consistency", normal_consistency},
                      {"sample_count", sample_count},
                      {"threshold", threshold},
                      {"seed", seed},
                      {"chamfer_convention",
                       "bidirectional mean of nearest-sample distances (L1) and squared distances (L2), halved"}};
  return j.dump(2);
}

std::string MetricReport::tsv_header() { return "l1_cd\tl2_cd\tf_score\tnormal_consistency\tsamples\tthreshold\tseed"; }

std::string MetricReport::to_tsv() const {
  std::ostringstream os;
  os << std::setprecision(9) << l1_cd << '\t' << l2_cd << '\t' << f_score << '\t' << normal_consistency << '\t'
     << sample_count << '\t' << threshold << '\t' << seed;
  return os.str();
}

}  // namespace edgerecon
