#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "drvote/dr_engine.hpp"
#include "drvote/geometry.hpp"
#include "drvote/rng.hpp"
#include "drvote/transport.hpp"

using namespace drvote;

namespace {

bool partition_bruteforce(const std::vector<long long>& items) {
  const long long total = std::accumulate(items.begin(), items.end(), 0LL);
  if (total % 2 != 0) return false;
  for (std::uint32_t mask = 0; mask < (1u << items.size()); ++mask) {
    long long s = 0;
    for (std::size_t i = 0; i < items.size(); ++i)
      if ((mask >> i) & 1) s += items[i];
    if (2 * s == total) return true;
  }
  return false;
}

bool split_exists(const std::vector<Rat>& d) {
  std::vector<Rat> nz;
  for (const Rat& v : d)
    if (v != 0) nz.push_back(v);
  if (nz.empty()) return false;
  for (std::uint32_t mask = 0; mask < (1u << nz.size()); ++mask) {
    Rat s = 0;
    for (std::size_t i = 0; i < nz.size(); ++i) s += (mask >> i) & 1 ? -nz[i] : nz[i];
    if (s == 0) return true;
  }
  return false;
}

Rat l1_dist(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += rat_abs(a[i] - b[i]);
  return s;
}

SimplexPoint corner(const CandidateSet& C, std::size_t i) {
  std::vector<Rat> c(6, Rat(0));
  c[i] = 1;
  return make_simplex_point(C, std::move(c));
}

Rat dot(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// dual norm of the normal, for hand-checking norm distances to hyperplanes
Rat dual_norm(const std::vector<Rat>& a, const PNorm& norm) {
  Rat s = 0;
  if (norm.is_inf()) {
    for (const Rat& v : a) s += rat_abs(v);
  } else {
    REQUIRE(norm.p() == 1);
    for (const Rat& v : a) s = std::max(s, rat_abs(v));
  }
  return s;
}

// points on the line normal . x = offset in dimension 2
std::vector<std::vector<Rat>> line_samples(const Hyperplane& h) {
  std::vector<std::vector<Rat>> pts;
  for (int k = -2; k <= 2; ++k) {
    if (h.normal[1] != 0) {
      Rat x0 = Rat(k);
      pts.push_back({x0, (h.offset - h.normal[0] * x0) / h.normal[1]});
    } else {
      pts.push_back({h.offset / h.normal[0], Rat(k)});
    }
  }
  return pts;
}

}  // namespace

TEST_CASE("partition solver matches exhaustive search") {
  CHECK(partition_solve({1, 2, 3}).feasible);
  CHECK(!partition_solve({1, 2}).feasible);
  CHECK(partition_solve({5, 5}).feasible);
  CHECK(!partition_solve({1, 2, 4}).feasible);  // odd total

  std::mt19937_64 rng(derive_seed(31, 0));
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t k = 1 + uniform_below(rng, 12);
    std::vector<long long> items(k);
    for (auto& v : items) v = static_cast<long long>(uniform_below(rng, 21));
    const PartitionResult got = partition_solve(items);
    CHECK(got.feasible == partition_bruteforce(items));
    if (got.feasible) {
      REQUIRE(got.side.size() == items.size());
      long long s0 = 0, s1 = 0;
      for (std::size_t i = 0; i < items.size(); ++i) (got.side[i] ? s1 : s0) += items[i];
      CHECK(s0 == s1);
    }
  }
}

TEST_CASE("partition solver validates and caps its input") {
  CHECK_THROWS_AS(partition_solve({3, -1}), Error);
  try {
    partition_solve({(1LL << 22), 5});
    FAIL("capacity gate did not fire");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
}

TEST_CASE("ambient l1 bisector verdict matches sign enumeration") {
  std::mt19937_64 rng(derive_seed(31, 1));
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t k = 1 + uniform_below(rng, 8);
    std::vector<Rat> x(k), y(k);
    auto draw = [&rng] {
      const long num = static_cast<long>(uniform_below(rng, 25)) - 12;
      const long den = 1 + static_cast<long>(uniform_below(rng, 3));
      return make_rat(num, den);
    };
    for (std::size_t i = 0; i < k; ++i) {
      x[i] = draw();
      y[i] = draw();
    }
    if (x == y) continue;
    std::vector<Rat> d(k);
    for (std::size_t i = 0; i < k; ++i) d[i] = x[i] - y[i];
    const BisectorVerdict v = large_bisector_l1(x, y);
    CHECK(!v.degenerate);
    CHECK(v.large == split_exists(d));
    if (v.large) {
      REQUIRE(v.ball_center.has_value());
      const std::vector<Rat>& c = *v.ball_center;
      CHECK(l1_dist(c, x) == l1_dist(c, y));
      CHECK(v.ball_radius > 0);
      // equidistance must survive any l-inf perturbation within the ball
      for (int probe = 0; probe < 8; ++probe) {
        std::vector<Rat> z = c;
        for (std::size_t i = 0; i < k; ++i) {
          const long num = static_cast<long>(uniform_below(rng, 9)) - 4;
          z[i] += v.ball_radius * make_rat(num, 4);
        }
        CHECK(l1_dist(z, x) == l1_dist(z, y));
      }
    }
  }
}

TEST_CASE("equal vectors give a degenerate bisector") {
  const std::vector<Rat> x = {Rat(1), make_rat(2, 3)};
  const BisectorVerdict v = large_bisector_l1(x, x);
  CHECK(v.degenerate);
  CHECK(v.large);
}

TEST_CASE("equal-sum splits reduce to the bisector question") {
  std::mt19937_64 rng(derive_seed(31, 2));
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t k = 1 + uniform_below(rng, 8);
    std::vector<long long> items(k);
    bool any = false;
    for (auto& v : items) {
      v = static_cast<long long>(uniform_below(rng, 15));
      any = any || v > 0;
    }
    if (!any) continue;
    std::vector<Rat> x(k), zero(k, Rat(0));
    for (std::size_t i = 0; i < k; ++i) x[i] = Rat(static_cast<long>(items[i]));
    CHECK(large_bisector_l1(x, zero).large == partition_solve(items).feasible);
  }
}

TEST_CASE("corner bisectors are large in the ambient space but not in the simplex") {
  const CandidateSet C = CandidateSet::alphabet(3);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      const SimplexPoint a = corner(C, i), b = corner(C, j);
      CHECK(large_bisector_l1(a.coords, b.coords).large);
      const SimplexBisectorVerdict v = large_bisector_l1_simplex(a, b);
      CHECK(!v.large);
      CHECK(!v.sample.has_value());
    }
  }
}

TEST_CASE("a simplex pair with a full-dimensional bisector cell") {
  const CandidateSet C = CandidateSet::alphabet(3);
  const SimplexPoint x = make_simplex_point(
      C, {make_rat(1, 3), make_rat(1, 6), make_rat(1, 6), make_rat(1, 6), make_rat(1, 12),
          make_rat(1, 12)});
  const SimplexPoint y = make_simplex_point(
      C, {make_rat(1, 6), make_rat(1, 3), make_rat(1, 6), make_rat(1, 6), make_rat(1, 12),
          make_rat(1, 12)});
  const SimplexBisectorVerdict v = large_bisector_l1_simplex(x, y);
  CHECK(v.large);
  CHECK(!v.degenerate);
  REQUIRE(v.sample.has_value());
  const SimplexPoint& s = *v.sample;
  Rat sum = 0;
  for (const Rat& c : s.coords) {
    CHECK(c >= 0);
    sum += c;
  }
  CHECK(sum == 1);
  CHECK(l1_dist(s.coords, x.coords) == l1_dist(s.coords, y.coords));
  // the equal-sum split uses the first two coordinates, both from below
  CHECK(v.signs[0] == 1);
  CHECK(v.signs[1] == 1);
}

TEST_CASE("transport bisector construction around the barycenter") {
  const CandidateSet C = CandidateSet::alphabet(3);
  const auto& all = enumerate_rankings(3);
  const BisectorConstruction B = large_bisector_construction(
      GroundMetric::kendall(), C, all[0], all[2], all[1], make_rat(1, 10));
  // swap distances are 1, so both points sit 1/10 off the barycenter
  CHECK(B.x.coords[0] == make_rat(1, 6) + make_rat(1, 10));
  CHECK(B.x.coords[2] == make_rat(1, 6) - make_rat(1, 10));
  CHECK(B.x.coords[1] == make_rat(1, 6));
  CHECK(B.y.coords[0] == make_rat(1, 6) + make_rat(1, 10));
  CHECK(B.y.coords[1] == make_rat(1, 6) - make_rat(1, 10));
  CHECK(B.r_index == 0);
  CHECK(B.region_radius > 0);
  CHECK(in_bisector_region(B, B.region_center));

  // every region sample is exactly equidistant from x and y in transport cost
  TransportOptions topt;
  topt.want_coupling = false;
  std::mt19937_64 rng(derive_seed(31, 3));
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t i = uniform_below(rng, 6);
    std::size_t j = uniform_below(rng, 6);
    if (j == i) j = (j + 1) % 6;
    const Rat t = B.region_radius * make_rat(static_cast<long>(uniform_below(rng, 9)), 8);
    std::vector<Rat> zc = B.region_center.coords;
    zc[i] += t;
    zc[j] -= t;
    const SimplexPoint z = make_simplex_point(C, std::move(zc));
    REQUIRE(in_bisector_region(B, z));
    const Rat dx = wasserstein(GroundMetric::kendall(), 1, z, B.x, topt).cost_pth_power;
    const Rat dy = wasserstein(GroundMetric::kendall(), 1, z, B.y, topt).cost_pth_power;
    CHECK(dx == dy);
    ++checked;
  }
  CHECK(checked == 30);

  // read the same tie through a three-class consensus rule
  std::map<SRanking, std::vector<SimplexPoint>> classes;
  classes[SRanking::of_candidate(0)] = {B.x};
  classes[SRanking::of_candidate(1)] = {B.y};
  classes[SRanking::of_candidate(2)] = {corner(C, 5)};
  const RuleSpec R{ConsensusSpec::point_sets(C, classes),
                   KantorovichSpec{GroundMetric::kendall(), 1}};
  const RuleOutcome out = dr_outcome(R, B.region_center);
  REQUIRE(out.scores.size() == 3);
  CHECK(out.scores[0].second == out.scores[1].second);
  CHECK(out.scores[0].second.value() < out.scores[2].second.value());
  CHECK(out.winners == std::vector<SRanking>{SRanking::of_candidate(0), SRanking::of_candidate(1)});
}

TEST_CASE("construction rejects bad arguments") {
  const CandidateSet C = CandidateSet::alphabet(3);
  const auto& all = enumerate_rankings(3);
  CHECK_THROWS_AS(large_bisector_construction(GroundMetric::kendall(), C, all[0], all[0], all[1],
                                              make_rat(1, 10)),
                  Error);
  // 1/5 >= barycenter coordinate 1/6
  CHECK_THROWS_AS(large_bisector_construction(GroundMetric::kendall(), C, all[0], all[2], all[1],
                                              make_rat(1, 5)),
                  Error);
  CHECK_THROWS_AS(large_bisector_construction(GroundMetric::kendall(), C, all[0], all[2], all[1],
                                              Rat(0)),
                  Error);
}

TEST_CASE("score-difference hyperplane for the swap-distance rule") {
  const CandidateSet C = CandidateSet::alphabet(3);
  const Hyperplane h = score_difference_hyperplane(ConsensusSpec::weak_unanimity(), C,
                                                   GroundMetric::kendall(), 1,
                                                   SRanking::of_candidate(0),
                                                   SRanking::of_candidate(1));
  const std::vector<Rat> want = {Rat(-1), Rat(-2), Rat(1), Rat(2), Rat(-1), Rat(1)};
  CHECK(h.normal == want);
  CHECK(h.offset == 0);

  CHECK_THROWS_AS(score_difference_hyperplane(ConsensusSpec::weak_unanimity(), C,
                                              GroundMetric::kendall(), 1,
                                              SRanking::of_candidate(0),
                                              SRanking::of_candidate(0)),
                  Error);
  std::map<SRanking, std::vector<SimplexPoint>> classes;
  classes[SRanking::of_candidate(0)] = {corner(C, 0)};
  classes[SRanking::of_candidate(1)] = {corner(C, 5)};
  CHECK_THROWS_AS(score_difference_hyperplane(ConsensusSpec::point_sets(C, classes), C,
                                              GroundMetric::kendall(), 1,
                                              SRanking::of_candidate(0),
                                              SRanking::of_candidate(1)),
                  Error);
}

TEST_CASE("pairwise score hyperplanes have nonzero normals") {
  const CandidateSet C = CandidateSet::alphabet(3);
  for (const ConsensusSpec& K :
       {ConsensusSpec::weak_unanimity(), ConsensusSpec::strong_unanimity(3)}) {
    for (const GroundMetric& g :
         {GroundMetric::kendall(), GroundMetric::discrete(), GroundMetric::footrule()}) {
      for (unsigned p : {1u, 2u}) {
        const auto outs = K.outcomes(C);
        for (std::size_t i = 0; i < outs.size(); ++i) {
          for (std::size_t j = i + 1; j < outs.size(); ++j) {
            const Hyperplane h = score_difference_hyperplane(K, C, g, p, outs[i], outs[j]);
            bool nonzero = false;
            for (const Rat& v : h.normal) nonzero = nonzero || v != 0;
            CHECK(nonzero);
          }
        }
      }
    }
  }
}

TEST_CASE("hyperplane functional equals the score difference on profiles") {
  const CandidateSet C = CandidateSet::alphabet(3);
  const Hyperplane h = score_difference_hyperplane(ConsensusSpec::weak_unanimity(), C,
                                                   GroundMetric::kendall(), 1,
                                                   SRanking::of_candidate(0),
                                                   SRanking::of_candidate(1));
  const RuleSpec R{ConsensusSpec::weak_unanimity(),
                   VotewiseSpec{GroundMetric::kendall(), PNorm::finite(1), false}};
  std::mt19937_64 rng(derive_seed(31, 4));
  for (int trial = 0; trial < 60; ++trial) {
    const long long n = 1 + static_cast<long long>(uniform_below(rng, 12));
    const AnonymousProfile E = sample_profile(3, n, Culture::ImpartialCulture, rng);
    Rat lhs = 0;
    for (std::size_t t = 0; t < 6; ++t) lhs += Rat(static_cast<long>(E.counts[t])) * h.normal[t];
    const RuleOutcome out = dr_outcome(R, E);
    const Rat diff = out.scores[0].second.value() - out.scores[1].second.value();
    CHECK(lhs == diff);
  }
}

TEST_CASE("bisector of parallel distinct hyperplanes is the midway plane") {
  const Hyperplane h1{{Rat(1), Rat(1)}, Rat(0)};
  const Hyperplane h2{{Rat(1), Rat(1)}, Rat(2)};
  for (const PNorm& norm : {PNorm::finite(1), PNorm::finite(2), PNorm::inf()}) {
    const HyperplaneBisector b = bisector_of_hyperplanes(h1, h2, norm);
    CHECK(b.plus_degenerate);
    CHECK(!b.minus_degenerate);
    CHECK(b.minus.normal == std::vector<Rat>{Rat(2), Rat(2)});
    CHECK(b.minus.offset == 2);
  }
}

TEST_CASE("identical hyperplanes are rejected") {
  const Hyperplane h{{Rat(1), Rat(2)}, Rat(3)};
  CHECK_THROWS_AS(bisector_of_hyperplanes(h, h, PNorm::finite(1)), Error);
  // same plane written with scaled coefficients still collapses one branch
  const Hyperplane g{{Rat(2), Rat(4)}, Rat(6)};
  CHECK_THROWS_AS(bisector_of_hyperplanes(h, g, PNorm::finite(2)), Error);
}

TEST_CASE("coordinate axes bisect into the diagonals") {
  const Hyperplane hx{{Rat(1), Rat(0)}, Rat(0)};
  const Hyperplane hy{{Rat(0), Rat(1)}, Rat(0)};
  const HyperplaneBisector b = bisector_of_hyperplanes(hx, hy, PNorm::finite(2));
  CHECK(b.plus.normal == std::vector<Rat>{Rat(1), Rat(-1)});
  CHECK(b.minus.normal == std::vector<Rat>{Rat(1), Rat(1)});
  CHECK(b.plus.offset == 0);
  CHECK(b.minus.offset == 0);
}

TEST_CASE("the l2 bisector needs a rational norm ratio") {
  const Hyperplane h1{{Rat(1), Rat(1)}, Rat(0)};
  const Hyperplane h2{{Rat(1), Rat(2)}, Rat(1)};
  CHECK_THROWS_AS(bisector_of_hyperplanes(h1, h2, PNorm::finite(2)), Error);
  // but the same pair works under the polyhedral norms
  CHECK_NOTHROW(bisector_of_hyperplanes(h1, h2, PNorm::finite(1)));
  CHECK_NOTHROW(bisector_of_hyperplanes(h1, h2, PNorm::inf()));

  // rational ratio: norms 5 and 1
  const Hyperplane h3{{Rat(3), Rat(4)}, Rat(1)};
  const Hyperplane h4{{Rat(0), Rat(1)}, Rat(0)};
  const HyperplaneBisector b = bisector_of_hyperplanes(h3, h4, PNorm::finite(2));
  for (const Hyperplane* br : {&b.plus, &b.minus}) {
    for (const auto& x : line_samples(*br)) {
      const Rat lhs = rat_abs(dot(h3.normal, x) - h3.offset);
      const Rat rhs = rat_abs(dot(h4.normal, x) - h4.offset);
      CHECK(lhs == Rat(5) * rhs);
    }
  }
}

TEST_CASE("polyhedral-norm bisector branches are genuinely equidistant") {
  const Hyperplane h1{{Rat(1), Rat(2)}, Rat(1)};
  const Hyperplane h2{{Rat(3), Rat(-1)}, Rat(2)};
  for (const PNorm& norm : {PNorm::finite(1), PNorm::inf()}) {
    const HyperplaneBisector b = bisector_of_hyperplanes(h1, h2, norm);
    const Rat n1 = dual_norm(h1.normal, norm);
    const Rat n2 = dual_norm(h2.normal, norm);
    for (const Hyperplane* br : {&b.plus, &b.minus}) {
      REQUIRE(!(br == &b.plus ? b.plus_degenerate : b.minus_degenerate));
      for (const auto& x : line_samples(*br)) {
        const Rat lhs = rat_abs(dot(h1.normal, x) - h1.offset) * n2;
        const Rat rhs = rat_abs(dot(h2.normal, x) - h2.offset) * n1;
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("segment distance: projection, clamping and endpoint exclusion") {
  const CandidateSet C = CandidateSet::alphabet(3);
  const SimplexPoint a = corner(C, 0);
  const SimplexPoint b = corner(C, 5);
  const Segment closed{a, b, true, true};

  // on the segment: distance zero at the interior parameter
  std::vector<Rat> mid(6, Rat(0));
  mid[0] = make_rat(1, 4);
  mid[5] = make_rat(3, 4);
  const SegmentDistance on = segment_distance(make_simplex_point(C, mid), closed);
  CHECK(on.sq_dist == 0);
  CHECK(on.attained);
  CHECK(on.t == make_rat(3, 4));

  // beyond an endpoint the parameter clamps
  const SegmentDistance at_b = segment_distance(b, closed);
  CHECK(at_b.sq_dist == 0);
  CHECK(at_b.t == 1);
  const SegmentDistance off = segment_distance(corner(C, 2), closed);
  CHECK(off.attained);
  CHECK(off.sq_dist > 0);

  // same geometry with the far end excluded: infimum unchanged, not attained
  const Segment half{a, b, true, false};
  const SegmentDistance lim = segment_distance(b, half);
  CHECK(lim.sq_dist == 0);
  CHECK(lim.t == 1);
  CHECK(!lim.attained);

  // zero-length segments: a point if an end is closed, empty if both open
  const Segment point{a, a, true, false};
  const SegmentDistance dp = segment_distance(b, point);
  CHECK(dp.attained);
  CHECK(dp.sq_dist == 2);
  const Segment ghost{a, a, false, false};
  CHECK(!segment_distance(b, ghost).attained);
  std::map<SRanking, std::vector<Segment>> classes;
  classes[SRanking::of_candidate(0)] = {ghost};
  CHECK_THROWS_AS(ConsensusSpec::segment_sets(C, classes), Error);
}

TEST_CASE("two classes sharing an excluded endpoint tie beyond it") {
  const CandidateSet C = CandidateSet::alphabet(3);
  const SimplexPoint P = make_simplex_point(C, std::vector<Rat>(6, make_rat(1, 6)));
  // zero-sum direction leaving P away from both corner segments
  const std::vector<Rat> v = {make_rat(-1, 3), make_rat(1, 6), make_rat(1, 6),
                              make_rat(1, 6),  make_rat(1, 6), make_rat(-1, 3)};
  auto along = [&](const Rat& t) {
    std::vector<Rat> c(6);
    for (std::size_t i = 0; i < 6; ++i) c[i] = P.coords[i] + t * v[i];
    return make_simplex_point(C, std::move(c));
  };
  const SimplexPoint z = along(make_rat(1, 4));

  const Segment L1{corner(C, 0), P, true, false};
  const Segment L2{corner(C, 5), P, true, false};
  for (const Segment* L : {&L1, &L2}) {
    const SegmentDistance d = segment_distance(z, *L);
    CHECK(d.t == 1);
    CHECK(!d.attained);
    CHECK(d.sq_dist == make_rat(1, 48));
  }

  std::map<SRanking, std::vector<Segment>> classes;
  classes[SRanking::of_candidate(0)] = {L1};
  classes[SRanking::of_candidate(1)] = {L2};
  classes[SRanking::of_candidate(2)] = {Segment{corner(C, 2), corner(C, 2), true, true}};
  const RuleSpec R{ConsensusSpec::segment_sets(C, classes), SimplexLp{PNorm::finite(2)}};
  const RuleOutcome tied = dr_outcome(R, z);
  CHECK(tied.winners ==
        std::vector<SRanking>{SRanking::of_candidate(0), SRanking::of_candidate(1)});
  CHECK(tied.scores[0].second.value() == make_rat(1, 48));
  CHECK(tied.scores[1].second.value() == make_rat(1, 48));

  // a third class holding the segment through z wins outright
  classes[SRanking::of_candidate(2)] = {
      Segment{along(make_rat(1, 8)), along(make_rat(3, 8)), true, true}};
  const RuleSpec R2{ConsensusSpec::segment_sets(C, classes), SimplexLp{PNorm::finite(2)}};
  const RuleOutcome won = dr_outcome(R2, z);
  CHECK(won.winners == std::vector<SRanking>{SRanking::of_candidate(2)});
  CHECK(won.scores[2].second.value() == 0);
}
