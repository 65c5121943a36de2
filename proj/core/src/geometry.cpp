#include "drvote/geometry.hpp"

#include <algorithm>

namespace drvote {

namespace {

// Total DP cells are gated by this sum bound; partitions over larger inputs
// would silently dominate memory.
constexpr long long kMaxPartitionSum = 1LL << 22;

}  // namespace

PartitionResult partition_solve(const std::vector<long long>& items) {
  long long total = 0;
  for (long long a : items) {
    if (a < 0) fail_domain("partition items must be nonnegative");
    total += a;
    if (total > kMaxPartitionSum) fail_capacity("partition instance too large");
  }
  if (total % 2 != 0) return {};
  const long long target = total / 2;
  const std::size_t n = items.size();
  // reach[i][s]: some subset of the first i items sums to s
  std::vector<std::vector<char>> reach(n + 1,
                                       std::vector<char>(static_cast<std::size_t>(target) + 1, 0));
  reach[0][0] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const long long a = items[i];
    for (long long s = 0; s <= target; ++s)
      reach[i + 1][static_cast<std::size_t>(s)] =
          reach[i][static_cast<std::size_t>(s)] ||
          (s >= a && reach[i][static_cast<std::size_t>(s - a)]);
  }
  if (!reach[n][static_cast<std::size_t>(target)]) return {};
  PartitionResult res;
  res.feasible = true;
  res.side.assign(n, 1);
  long long s = target;
  for (std::size_t i = n; i > 0; --i) {
    const long long a = items[i - 1];
    if (s >= a && reach[i - 1][static_cast<std::size_t>(s - a)]) {
      res.side[i - 1] = 0;
      s -= a;
    }
  }
  return res;
}

BisectorVerdict large_bisector_l1(const std::vector<Rat>& x, const std::vector<Rat>& y) {
  if (x.size() != y.size()) fail_domain("bisector of vectors with different dimensions");
  if (x.empty()) fail_domain("bisector in dimension zero");
  const std::size_t k = x.size();
  std::vector<Rat> d(k);
  bool all_zero = true;
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = x[i] - y[i];
    if (d[i] != 0) all_zero = false;
  }
  BisectorVerdict v;
  v.signs.assign(k, 0);
  v.ball_radius = 0;
  if (all_zero) {
    v.large = true;
    v.degenerate = true;
    v.ball_center = x;
    v.ball_radius = 1;
    return v;
  }

  const Int scale = lcm_of_denominators(d);
  std::vector<long long> values;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < k; ++i) {
    if (d[i] == 0) continue;
    Rat scaled = rat_abs(d[i]) * Rat(scale);
    Int num = scaled.get_num();  // integral after scaling
    if (!num.fits_slong_p()) fail_capacity("bisector differences too large after scaling");
    values.push_back(num.get_si());
    where.push_back(i);
  }
  const PartitionResult part = partition_solve(values);
  if (!part.feasible) return v;

  v.large = true;
  // side 0 keeps the sign of d_i so the signed sum of cell differences
  // telescopes to (sum side 0) - (sum side 1) = 0
  for (std::size_t t = 0; t < where.size(); ++t) {
    const std::size_t i = where[t];
    const int sgn = d[i] > 0 ? 1 : -1;
    v.signs[i] = part.side[t] == 0 ? sgn : -sgn;
  }
  std::vector<Rat> center(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (v.signs[i] > 0)
      center[i] = std::min(x[i], y[i]) - 1;
    else if (v.signs[i] < 0)
      center[i] = std::max(x[i], y[i]) + 1;
    else
      center[i] = x[i];
  }
  v.ball_center = std::move(center);
  v.ball_radius = make_rat(1, 2);
  return v;
}

SimplexBisectorVerdict large_bisector_l1_simplex(const SimplexPoint& x, const SimplexPoint& y) {
  if (!(x.candidates == y.candidates))
    fail_domain("bisector of points over different candidate sets");
  const std::size_t M = x.coords.size();
  std::vector<Rat> d(M);
  std::vector<std::size_t> nz;
  for (std::size_t i = 0; i < M; ++i) {
    d[i] = x.coords[i] - y.coords[i];
    if (d[i] != 0) nz.push_back(i);
  }
  SimplexBisectorVerdict v;
  v.signs.assign(M, 0);
  if (nz.empty()) {
    v.large = true;
    v.degenerate = true;
    v.sample = x;
    return v;
  }
  if (nz.size() > 16) fail_capacity("too many differing coordinates for sign enumeration");

  for (std::uint32_t mask = 0; mask < (1u << nz.size()); ++mask) {
    Rat sum = 0;
    for (std::size_t t = 0; t < nz.size(); ++t)
      sum += (mask >> t) & 1 ? -d[nz[t]] : d[nz[t]];
    if (sum != 0) continue;

    // cell intervals: below both coordinates (+1) or above both (-1)
    std::vector<Rat> lo(M, Rat(0)), hi(M, Rat(1));
    std::vector<int> signs(M, 0);
    bool ok = true;
    for (std::size_t t = 0; t < nz.size() && ok; ++t) {
      const std::size_t i = nz[t];
      if ((mask >> t) & 1) {
        signs[i] = -1;
        lo[i] = std::max(x.coords[i], y.coords[i]);
      } else {
        signs[i] = 1;
        hi[i] = std::min(x.coords[i], y.coords[i]);
        if (hi[i] == 0) ok = false;
      }
    }
    if (!ok) continue;
    Rat lo_sum = 0, hi_sum = 0;
    for (std::size_t i = 0; i < M; ++i) {
      lo_sum += lo[i];
      hi_sum += hi[i];
    }
    if (!(lo_sum < 1 && 1 < hi_sum)) continue;

    const Rat t = (1 - lo_sum) / (hi_sum - lo_sum);
    std::vector<Rat> coords(M);
    for (std::size_t i = 0; i < M; ++i) coords[i] = lo[i] + t * (hi[i] - lo[i]);
    v.large = true;
    v.signs = std::move(signs);
    v.sample = SimplexPoint{x.candidates, std::move(coords)};
    return v;
  }
  return v;
}

BisectorConstruction large_bisector_construction(const GroundMetric& g, const CandidateSet& C,
                                                 const Ranking& r, const Ranking& r1,
                                                 const Ranking& r2, const Rat& eps) {
  const int m = C.size();
  const long long M = factorial(m);
  if (r == r1 || r == r2 || r1 == r2) fail_domain("construction needs three distinct rankings");
  const Rat d1 = ground_distance(g, r, r1);
  const Rat d2 = ground_distance(g, r, r2);
  if (d1 == 0 || d2 == 0) fail_domain("construction needs positive ground distances");
  if (eps <= 0) fail_domain("construction offset must be positive");
  const Rat bary = make_rat(int_of(1), int_of(M));
  if (eps / d1 >= bary || eps / d2 >= bary)
    fail_domain("construction offset too large for the barycenter");

  const std::size_t ir = static_cast<std::size_t>(ranking_index(r));
  const std::size_t i1 = static_cast<std::size_t>(ranking_index(r1));
  const std::size_t i2 = static_cast<std::size_t>(ranking_index(r2));
  std::vector<Rat> xc(static_cast<std::size_t>(M), bary), yc(static_cast<std::size_t>(M), bary);
  xc[ir] += eps / d1;
  xc[i1] -= eps / d1;
  yc[ir] += eps / d2;
  yc[i2] -= eps / d2;

  BisectorConstruction B;
  B.x = make_simplex_point(C, std::move(xc));
  B.y = make_simplex_point(C, std::move(yc));
  B.r_index = static_cast<long long>(ir);

  const Rat mind = std::min(eps / d1, eps / d2);
  const Rat delta = std::min(mind, bary) / 2;
  std::vector<Rat> zc(static_cast<std::size_t>(M), bary);
  zc[ir] -= delta;
  for (std::size_t i = 0; i < zc.size(); ++i)
    if (i != ir) zc[i] += delta / rat_of(M - 1);
  B.region_center = make_simplex_point(C, std::move(zc));
  B.region_radius = delta / rat_of(2 * (M - 1));
  return B;
}

bool in_bisector_region(const BisectorConstruction& B, const SimplexPoint& z) {
  const std::size_t ir = static_cast<std::size_t>(B.r_index);
  for (std::size_t i = 0; i < z.coords.size(); ++i) {
    if (i == ir) {
      if (z.coords[i] > std::min(B.x.coords[i], B.y.coords[i])) return false;
    } else {
      if (z.coords[i] < std::max(B.x.coords[i], B.y.coords[i])) return false;
    }
  }
  return true;
}

Hyperplane score_difference_hyperplane(const ConsensusSpec& K, const CandidateSet& C,
                                       const GroundMetric& g, unsigned p, const SRanking& r,
                                       const SRanking& r2) {
  if (!K.has_ballot_classes())
    fail_domain("score hyperplanes need ballot-class consensuses");
  if (p < 1) fail_domain("norm exponent must satisfy p >= 1");
  if (r == r2) fail_domain("score difference needs two distinct outcomes");
  const auto ta = delta_table(K, C, g, r);
  const auto tb = delta_table(K, C, g, r2);
  Hyperplane h;
  h.offset = 0;
  h.normal.resize(ta->size());
  bool nonzero = false;
  for (std::size_t i = 0; i < ta->size(); ++i) {
    h.normal[i] = rat_pow((*ta)[i], p) - rat_pow((*tb)[i], p);
    nonzero = nonzero || h.normal[i] != 0;
  }
  // distinct classes always separate some ballot, so a vanishing normal
  // means the delta tables are broken
  if (!nonzero) fail_internal("score hyperplane collapsed to the zero functional");
  return h;
}

namespace {

bool rat_sqrt(const Rat& q, Rat* out) {
  if (q < 0) return false;
  Rat canon = q;
  canon.canonicalize();
  const Int num = canon.get_num(), den = canon.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return false;
  Int ns, ds;
  mpz_sqrt(ns.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(ds.get_mpz_t(), den.get_mpz_t());
  *out = make_rat(ns, ds);
  return true;
}

}  // namespace

HyperplaneBisector bisector_of_hyperplanes(const Hyperplane& h1, const Hyperplane& h2,
                                           const PNorm& norm) {
  if (h1.normal.size() != h2.normal.size())
    fail_domain("bisector of hyperplanes with different dimensions");
  auto zero_normal = [](const Hyperplane& h) {
    for (const Rat& a : h.normal)
      if (a != 0) return false;
    return true;
  };
  if (zero_normal(h1) || zero_normal(h2)) fail_domain("hyperplane with zero normal");

  // distance under a norm divides by the dual norm of the normal
  Rat t;
  if (!norm.is_inf() && norm.p() == 2) {
    Rat s1 = 0, s2 = 0;
    for (const Rat& a : h1.normal) s1 += a * a;
    for (const Rat& a : h2.normal) s2 += a * a;
    if (!rat_sqrt(s1 / s2, &t))
      fail_domain("l2 bisector requires a rational norm ratio; use l1 or linf");
  } else if (!norm.is_inf() && norm.p() == 1) {
    Rat n1 = 0, n2 = 0;  // dual of l1 is linf
    for (const Rat& a : h1.normal) n1 = std::max(n1, rat_abs(a));
    for (const Rat& a : h2.normal) n2 = std::max(n2, rat_abs(a));
    t = n1 / n2;
  } else if (norm.is_inf()) {
    Rat n1 = 0, n2 = 0;  // dual of linf is l1
    for (const Rat& a : h1.normal) n1 += rat_abs(a);
    for (const Rat& a : h2.normal) n2 += rat_abs(a);
    t = n1 / n2;
  } else {
    fail_domain("hyperplane bisectors support the l1, l2 and linf norms");
  }

  HyperplaneBisector b;
  b.plus.normal.resize(h1.normal.size());
  b.minus.normal.resize(h1.normal.size());
  for (std::size_t i = 0; i < h1.normal.size(); ++i) {
    b.plus.normal[i] = h1.normal[i] - t * h2.normal[i];
    b.minus.normal[i] = h1.normal[i] + t * h2.normal[i];
  }
  b.plus.offset = h1.offset - t * h2.offset;
  b.minus.offset = h1.offset + t * h2.offset;
  b.plus_degenerate = zero_normal(b.plus);
  b.minus_degenerate = zero_normal(b.minus);
  // A branch with zero normal and zero offset means the inputs were the same
  // point set; every point is then trivially equidistant.
  if ((b.plus_degenerate && b.plus.offset == 0) || (b.minus_degenerate && b.minus.offset == 0))
    fail_domain("identical hyperplanes have no proper bisector");
  return b;
}

SegmentDistance segment_distance(const SimplexPoint& z, const Segment& seg) {
  if (!(z.candidates == seg.a.candidates) || !(z.candidates == seg.b.candidates))
    fail_domain("segment distance across different candidate sets");
  const std::size_t M = z.coords.size();
  Rat den = 0, num = 0;
  for (std::size_t i = 0; i < M; ++i) {
    const Rat u = seg.b.coords[i] - seg.a.coords[i];
    den += u * u;
    num += (z.coords[i] - seg.a.coords[i]) * u;
  }
  SegmentDistance out;
  if (den == 0) {
    out.t = 0;
    out.attained = seg.a_closed || seg.b_closed;
  } else {
    Rat t = num / den;
    if (t < 0) t = 0;
    if (t > 1) t = 1;
    out.t = t;
    out.attained = !(t == 0 && !seg.a_closed) && !(t == 1 && !seg.b_closed);
  }
  Rat sq = 0;
  for (std::size_t i = 0; i < M; ++i) {
    const Rat diff = z.coords[i] - (seg.a.coords[i] + out.t * (seg.b.coords[i] - seg.a.coords[i]));
    sq += diff * diff;
  }
  out.sq_dist = sq;
  return out;
}

}  // namespace drvote
