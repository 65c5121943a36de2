#pragma once

#include <optional>

#include "drvote/consensus.hpp"

namespace drvote {

struct PartitionResult {
  bool feasible = false;
  std::vector<int> side;  // 0/1 per item when feasible
};

// Does the multiset split into two halves of equal sum? Items must be
// nonnegative; the dynamic program is gated by total sum.
PartitionResult partition_solve(const std::vector<long long>& items);

// l1 bisector of x and y in Q^k. Writing d = x - y, the difference
// ||z-x||_1 - ||z-y||_1 equals sum_i s_i d_i on the open cell where z_i lies
// below min(x_i, y_i) (s_i = +1) or above max(x_i, y_i) (s_i = -1), so the
// bisector contains a full-dimensional cell exactly when the multiset
// {|d_i| : d_i != 0} admits an equal-sum split. Otherwise it has measure
// zero. Equal vectors are flagged degenerate (the bisector is everything).
struct BisectorVerdict {
  bool large = false;
  bool degenerate = false;
  std::vector<int> signs;  // +1 below, -1 above, 0 where x_i == y_i
  std::optional<std::vector<Rat>> ball_center;
  Rat ball_radius;  // l-inf ball around the center inside the bisector
};

BisectorVerdict large_bisector_l1(const std::vector<Rat>& x, const std::vector<Rat>& y);

// Same question relative to the vote simplex: does the bisector contain a
// relatively open piece of the simplex? A sign cell meets the simplex
// interior iff the per-coordinate intervals admit a point summing to 1.
struct SimplexBisectorVerdict {
  bool large = false;
  bool degenerate = false;
  std::vector<int> signs;
  std::optional<SimplexPoint> sample;  // relative-interior point of the cell
};

SimplexBisectorVerdict large_bisector_l1_simplex(const SimplexPoint& x, const SimplexPoint& y);

// Two consensus points whose Kantorovich (p = 1) bisector contains a
// full-dimensional region of the simplex:
//   x = b + (eps/d(r,r1)) (e_r - e_r1),   y = b + (eps/d(r,r2)) (e_r - e_r2)
// around the barycenter b. On the region below, z - x and z - y are
// nonnegative away from r, so both distances are the same linear functional
// of z and agree identically.
struct BisectorConstruction {
  SimplexPoint x;
  SimplexPoint y;
  long long r_index;            // the common sink ranking
  SimplexPoint region_center;   // strict-interior point of the region
  Rat region_radius;            // coordinate-wise slack around the center
};

BisectorConstruction large_bisector_construction(const GroundMetric& g, const CandidateSet& C,
                                                 const Ranking& r, const Ranking& r1,
                                                 const Ranking& r2, const Rat& eps);

// z_r <= min(x_r, y_r) and z_{r'} >= max(x_{r'}, y_{r'}) for r' != r.
bool in_bisector_region(const BisectorConstruction& B, const SimplexPoint& z);

struct Hyperplane {
  std::vector<Rat> normal;
  Rat offset;
};

// Decision boundary between outcomes r and r2 of the votewise rule
// (K, g, finite p) as a functional of the vote counts:
//   score_r(E) - score_r2(E) = <counts, normal> with offset 0,
// normal_t = delta(t, r)^p - delta(t, r2)^p. Ballot-class consensuses only.
Hyperplane score_difference_hyperplane(const ConsensusSpec& K, const CandidateSet& C,
                                       const GroundMetric& g, unsigned p, const SRanking& r,
                                       const SRanking& r2);

// Bisector of two hyperplanes under a norm: points whose norm-distances to
// the planes agree, i.e. |<a1,x>-b1| / ||a1||_* = |<a2,x>-b2| / ||a2||_*.
// Two branches; with t = ||a1||_* / ||a2||_* the plus branch collects the
// equation <a1 - t a2, x> = b1 - t b2 and the minus branch the + t version.
// The dual norm of l1 is l-inf and vice versa; l2 is self-dual and is exact
// only when t^2 is a square of a rational (Domain error otherwise).
struct HyperplaneBisector {
  Hyperplane plus;
  Hyperplane minus;
  bool plus_degenerate = false;   // zero normal: everything or nothing
  bool minus_degenerate = false;
};

HyperplaneBisector bisector_of_hyperplanes(const Hyperplane& h1, const Hyperplane& h2,
                                           const PNorm& norm);

// Squared l2 distance from a point to a segment. When the nearest point is
// an excluded endpoint the value is still the infimum but attained = false.
struct SegmentDistance {
  Rat sq_dist;
  bool attained = true;
  Rat t;  // parameter of the nearest (or limiting) segment point
};

SegmentDistance segment_distance(const SimplexPoint& z, const Segment& seg);

}  // namespace drvote
