#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sdfgrow/sample_set.hpp"
#include "sdfgrow/workspace.hpp"

namespace sdfgrow {

/// Which crossing circles contribute closest/farthest candidates (3D).
/// Refinement uses only circles no other ball touches; repair and the
/// minimum radius search use every circle with an uncovered arc.
enum class CircleMode { kFullyUncovered, kAnyUncovered };

enum class CandidateKind { kSelf, kTangent, kIntersection, kCircleExtreme };

struct GrowToCandidate {
  Vec3 q;
  CandidateKind kind = CandidateKind::kSelf;
  std::array<std::uint32_t, 3> hosts{};
  int host_count = 0;

  std::span<const std::uint32_t> host_span() const {
    return {hosts.data(), static_cast<std::size_t>(host_count)};
  }
};

struct ScoredRadius {
  double s = 0.0;
  double score = 0.0;
  GrowToCandidate source;
};

/// Sphere radius bound used when nothing tighter is known: the diameter of
/// [-1,1]^d.
double default_max_radius(int dim);

/// Grow-to points of p: p itself, uncovered tangent points, uncovered
/// pairwise (2D) or triple (3D) intersections, and (3D) extreme points of
/// crossing circles. Candidates farther than max_radius from p are dropped.
std::vector<GrowToCandidate> grow_to_points(const Vec3& p, const Workspace& ws,
                                            CircleMode mode = CircleMode::kFullyUncovered,
                                            double max_radius = std::numeric_limits<double>::infinity());
std::vector<GrowToCandidate> grow_to_points(const Vec3& p, const SampleSet& set,
                                            CircleMode mode = CircleMode::kFullyUncovered);

/// Score of growing a sphere of signed radius s at p to candidate q.
/// `hosts` are the samples q lies on (empty for the self candidate).
double score_for_radius(const Vec3& p, double s, std::span<const Sample> hosts, const GrowToCandidate& q,
                        double max_radius);

/// True iff the set plus (p, s) is a valid discrete SDF. Requires a valid set.
bool validity_with_candidate(const Workspace& ws, const Vec3& p, double s);
bool validity_with_candidate(const SampleSet& set, const Vec3& p, double s);

/// Every scored radius for p, best first (the order validation tries them).
std::vector<ScoredRadius> scored_radii(const Vec3& p, const Workspace& ws, double max_radius,
                                       CircleMode mode = CircleMode::kFullyUncovered);

struct InterpolationStats {
  std::size_t candidates = 0;
  std::size_t validations = 0;
  bool fell_back = false;
};

/// Highest-scoring valid value at p with |s| <= max_radius; falls back to the
/// minimum valid radius when no candidate validates.
double interpolate_sdf_to(const Vec3& p, const Workspace& ws, double max_radius,
                          CircleMode mode = CircleMode::kFullyUncovered, InterpolationStats* stats = nullptr);
double interpolate_sdf_to(const Vec3& p, const SampleSet& set, double max_radius);
double interpolate_sdf_to(const Vec3& p, const SampleSet& set);

struct MinRadiusOptions {
  /// Magnitude the caller would like to keep (a conservative original value).
  double lower_bound = 0.0;
  /// Sign of the original value, used with lower_bound; 0 = unknown.
  int original_sign = 0;
  CircleMode mode = CircleMode::kAnyUncovered;
};

struct MinRadiusResult {
  double s = 0.0;
  /// The geometric minimum fell below lower_bound and the original value was
  /// kept because it validates.
  bool kept_original = false;
  /// The geometric minimum fell below lower_bound and was returned anyway.
  bool below_floor = false;
};

/// Smallest-magnitude valid value at p: zero outside every ball, otherwise
/// the distance to the nearest uncovered point of the same-sign union
/// boundary, signed like the containing ball.
MinRadiusResult min_valid_radius_ex(const Vec3& p, const Workspace& ws, const MinRadiusOptions& opts = {});
double min_valid_radius(const Vec3& p, const Workspace& ws, double lower_bound = 0.0);
double min_valid_radius(const Vec3& p, const SampleSet& set, double lower_bound = 0.0);

}  // namespace sdfgrow
