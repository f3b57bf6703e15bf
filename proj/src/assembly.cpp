#include "edgerecon/assembly.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "edgerecon/spatial_index.hpp"

namespace edgerecon {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

using EdgeCounts = std::unordered_map<std::uint64_t, int>;

EdgeCounts count_edges(const std::vector<Face>& faces) {
  EdgeCounts counts;
  counts.reserve(faces.size() * 3);
  for (const Face& f : faces) {
    for (int k = 0; k < 3; ++k) ++counts[edge_key(f[k], f[(k + 1) % 3])];
  }
  return counts;
}

std::array<Index, 3> sorted_triple(const Face& f) {
  std::array<Index, 3> t = f;
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

void AssemblyConfig::validate() const {
  if (!(d_th > 0.0)) throw std::invalid_argument("assembly: d_th must be positive");
  if (!(length_factor > 1.0)) throw std::invalid_argument("assembly: length factor must exceed 1");
}

std::string AssemblyDiagnostics::to_json() const {
  nlohmann::json j = {{"candidate_edges", candidate_edges},
                      {"filtered_edges", filtered_edges},
                      {"pruned_edges", pruned_edges},
                      {"kept_edges", kept_edges},
                      {"enumerated_triangles", enumerated_triangles},
                      {"accepted_triangles", accepted_triangles},
                      {"boundary_edges", boundary_edges},
                      {"filled_rings", filled_rings},
                      {"unfilled_rings", unfilled_rings},
                      {"fill_triangles", fill_triangles},
                      {"messages", messages}};
  return j.dump(2);
}

std::vector<CandidateEdge> filter_edges(const std::vector<ScoredEdge>& scored, double d_th) {
  std::vector<CandidateEdge> out;
  for (const ScoredEdge& s : scored) {
    if (s.predicted < d_th) out.push_back(s.edge);
  }
  return out;
}

std::vector<CandidateEdge> prune_long_edges(const std::vector<CandidateEdge>& edges, double factor) {
  if (edges.empty()) return {};
  double sum = 0.0;
  for (const CandidateEdge& e : edges) sum += e.length;
  const double limit = factor * (sum / static_cast<double>(edges.size()));
  std::vector<CandidateEdge> out;
  out.reserve(edges.size());
  for (const CandidateEdge& e : edges) {
    if (!(e.length > limit)) out.push_back(e);
  }
  return out;
}

std::vector<TriangleCandidate> enumerate_triangles(const std::vector<CandidateEdge>& edges) {
  // Forward adjacency: adj[a] holds (b, |ab|) for b > a, sorted by b.
  std::map<Index, std::vector<std::pair<Index, double>>> adj;
  for (const CandidateEdge& e : edges) {
    if (e.i == e.j) continue;
    adj[std::min(e.i, e.j)].emplace_back(std::max(e.i, e.j), e.length);
  }
  for (auto& [v, list] : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end(),
                           [](const auto& x, const auto& y) { return x.first == y.first; }),
               list.end());
  }

  std::vector<TriangleCandidate> out;
  for (const auto& [a, na] : adj) {
    for (std::size_t p = 0; p < na.size(); ++p) {
      const auto [b, ab] = na[p];
      const auto it = adj.find(b);
      if (it == adj.end()) continue;
      const auto& nb = it->second;
      // Intersect na[p+1..] with nb; both sorted, all entries > b.
      std::size_t q = p + 1, r = 0;
      while (q < na.size() && r < nb.size()) {
        if (na[q].first < nb[r].first) {
          ++q;
        } else if (nb[r].first < na[q].first) {
          ++r;
        } else {
          const double ac = na[q].second;
          const double bc = nb[r].second;
          out.push_back(TriangleCandidate{{a, b, na[q].first}, std::max({ab, ac, bc}), ab + ac + bc});
          ++q;
          ++r;
        }
      }
    }
  }
  return out;
}

bool triangle_order(const TriangleCandidate& a, const TriangleCandidate& b) {
  if (a.max_edge_length != b.max_edge_length) return a.max_edge_length < b.max_edge_length;
  if (a.perimeter != b.perimeter) return a.perimeter < b.perimeter;
  return a.vertices < b.vertices;
}

std::vector<Face> greedy_select(std::vector<TriangleCandidate> tris) {
  for (TriangleCandidate& t : tris) std::sort(t.vertices.begin(), t.vertices.end());
  std::sort(tris.begin(), tris.end(), triangle_order);

  EdgeCounts counts;
  std::set<std::array<Index, 3>> accepted_sets;
  std::vector<Face> accepted;
  for (const TriangleCandidate& t : tris) {
    const auto& v = t.vertices;
    if (v[0] == v[1] || v[1] == v[2]) continue;
    const std::uint64_t keys[3] = {edge_key(v[0], v[1]), edge_key(v[1], v[2]), edge_key(v[0], v[2])};
    bool blocked = accepted_sets.count(v) > 0;
    for (std::uint64_t k : keys) {
      if (blocked) break;
      const auto it = counts.find(k);
      blocked = it != counts.end() && it->second >= 2;
    }
    if (blocked) continue;
    for (std::uint64_t k : keys) ++counts[k];
    accepted_sets.insert(v);
    accepted.push_back(Face{v[0], v[1], v[2]});
  }
  return accepted;
}

HoleFillResult fill_holes(const std::vector<Face>& faces, std::size_t ring_max) {
  HoleFillResult result;
  EdgeCounts counts = count_edges(faces);
  std::set<std::array<Index, 3>> existing;
  for (const Face& f : faces) existing.insert(sorted_triple(f));

  std::map<Index, std::vector<Index>> boundary;
  std::vector<std::uint64_t> boundary_keys;
  for (const auto& [key, c] : counts) {
    if (c != 1) continue;
    const auto a = static_cast<Index>(key >> 32);
    const auto b = static_cast<Index>(key & 0xffffffffu);
    boundary[a].push_back(b);
    boundary[b].push_back(a);
    boundary_keys.push_back(key);
  }
  result.boundary_edges = boundary_keys.size();
  for (auto& [v, list] : boundary) std::sort(list.begin(), list.end());

  // Connected components of the boundary graph, visited from the lowest vertex.
  std::set<Index> seen;
  for (const auto& entry : boundary) {
    const Index start = entry.first;
    if (seen.count(start)) continue;
    std::vector<Index> component;
    std::vector<Index> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      component.push_back(v);
      for (Index w : boundary[v]) {
        if (seen.insert(w).second) stack.push_back(w);
      }
    }
    const bool simple = std::all_of(component.begin(), component.end(),
                                    [&](Index v) { return boundary[v].size() == 2; });
    if (!simple || component.size() > ring_max) {
      ++result.unfilled_rings;
      continue;
    }

    // Walk the cycle from its lowest vertex toward the smaller neighbor.
    const Index first = *std::min_element(component.begin(), component.end());
    std::vector<Index> loop{first};
    Index prev = first, cur = boundary[first].front();
    while (cur != first) {
      loop.push_back(cur);
      const auto& nb = boundary[cur];
      const Index next = nb[0] == prev ? nb[1] : nb[0];
      prev = cur;
      cur = next;
    }

    std::vector<Face> fan;
    for (std::size_t k = 1; k + 1 < loop.size(); ++k) fan.push_back(Face{loop[0], loop[k], loop[k + 1]});
    bool ok = true;
    for (std::size_t k = 2; k + 1 < loop.size() && ok; ++k) ok = counts.count(edge_key(loop[0], loop[k])) == 0;
    for (const Face& f : fan) ok = ok && existing.count(sorted_triple(f)) == 0;
    if (!ok) {
      ++result.unfilled_rings;
      continue;
    }
    for (const Face& f : fan) {
      for (int k = 0; k < 3; ++k) ++counts[edge_key(f[k], f[(k + 1) % 3])];
      existing.insert(sorted_triple(f));
      result.added.push_back(f);
    }
    ++result.filled_rings;
  }
  return result;
}

ReconstructionResult assemble(const PointCloud& cloud, const std::vector<ScoredEdge>& scored,
                              const AssemblyConfig& cfg) {
  cfg.validate();
  ReconstructionResult result;
  result.mesh.vertices = cloud.points;
  AssemblyDiagnostics& d = result.diagnostics;
  d.candidate_edges = scored.size();

  std::vector<CandidateEdge> kept;
  if (cfg.prune_before_filter) {
    std::vector<CandidateEdge> all;
    all.reserve(scored.size());
    for (const ScoredEdge& s : scored) all.push_back(s.edge);
    const auto pruned = prune_long_edges(all, cfg.length_factor);
    d.pruned_edges = all.size() - pruned.size();
    std::vector<ScoredEdge> rescored;
    std::size_t p = 0;
    for (const ScoredEdge& s : scored) {
      if (p < pruned.size() && pruned[p] == s.edge) {
        rescored.push_back(s);
        ++p;
      }
    }
    kept = filter_edges(rescored, cfg.d_th);
    d.filtered_edges = filter_edges(scored, cfg.d_th).size();
  } else {
    const auto filtered = filter_edges(scored, cfg.d_th);
    d.filtered_edges = filtered.size();
    kept = prune_long_edges(filtered, cfg.length_factor);
    d.pruned_edges = filtered.size() - kept.size();
  }
  d.kept_edges = kept.size();
  if (kept.empty()) {
    d.messages.push_back("no candidate edge survived filtering; the mesh is empty");
    return result;
  }

  auto tris = enumerate_triangles(kept);
  d.enumerated_triangles = tris.size();
  result.mesh.faces = greedy_select(std::move(tris));
  d.accepted_triangles = result.mesh.faces.size();

  HoleFillResult fill = fill_holes(result.mesh.faces, cfg.ring_max);
  d.boundary_edges = fill.boundary_edges;
  d.filled_rings = fill.filled_rings;
  d.unfilled_rings = fill.unfilled_rings;
  d.fill_triangles = fill.added.size();
  result.mesh.faces.insert(result.mesh.faces.end(), fill.added.begin(), fill.added.end());
  if (result.mesh.faces.empty()) d.messages.push_back("edges survived but formed no triangle");
  return result;
}

ReconstructionResult reconstruct(const PointCloud& cloud, const RegressorParams& params,
                                 const ReconstructionParams& cfg) {
  check_cloud(cloud);
  if (params.arch.input_dimension() != 3 * cfg.n) {
    throw std::invalid_argument("reconstruct: model expects " + std::to_string(params.arch.input_dimension() / 3) +
                                " neighbors, configured n=" + std::to_string(cfg.n));
  }
  const SpatialIndex index(cloud.points);
  const CandidateEdgeSet candidates = generate_candidates(cloud, index, cfg.k);
  const EdgeEmbedder embedder(cloud, index, cfg.n, cfg.mode);

  constexpr std::size_t kChunk = 1024;
  std::vector<ScoredEdge> scored;
  scored.reserve(candidates.edges.size());
  std::vector<EmbeddingPair> pairs;
  for (std::size_t begin = 0; begin < candidates.edges.size(); begin += kChunk) {
    const std::size_t end = std::min(candidates.edges.size(), begin + kChunk);
    pairs.clear();
    for (std::size_t e = begin; e < end; ++e) pairs.push_back(embedder(candidates.edges[e]));
    const std::vector<double> pred = predict_batch(params, pairs);
    for (std::size_t e = begin; e < end; ++e) scored.push_back(ScoredEdge{candidates.edges[e], pred[e - begin]});
  }
  return assemble(cloud, scored, cfg.assembly);
}

}  // namespace edgerecon
