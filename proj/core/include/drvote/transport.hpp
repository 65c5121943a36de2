#pragma once

#include "drvote/elections.hpp"
#include "drvote/rankings.hpp"

namespace drvote {

struct TransportOptions {
  bool allow_large_m = false;  // opt in to m = 7, 8 (heavy)
  bool want_coupling = true;
};

struct TransportResult {
  Rat cost_pth_power;  // sum over the coupling of ground^p
  unsigned p = 1;
  std::vector<std::vector<Rat>> coupling;  // row marginal x, column marginal y
};

// Exact p-Wasserstein transport between two points of the vote simplex with
// ground costs d(r, r')^p. Solved as an integer transportation problem
// (denominators cleared) by successive shortest paths; the result is
// certified optimal via complementary slackness before being returned.
// No diagonal pre-cancellation: for p >= 2 routing through an intermediate
// ranking can beat the direct move, so the full marginals are solved.
TransportResult wasserstein(const GroundMetric& g, unsigned p, const SimplexPoint& x,
                            const SimplexPoint& y, const TransportOptions& opts = {});

Rat total_variation(const SimplexPoint& x, const SimplexPoint& y);

// Independent oracle: realize both points with n voters and minimize the
// votewise p-th power over all voter bijections directly, divided by n to
// match the coupling convention. No flow machinery involved.
Rat quotient_bruteforce(const GroundMetric& g, unsigned p, const SimplexPoint& x,
                        const SimplexPoint& y, long long n, long long max_n = 6);

// Kantorovich norm of a zero-sum vector over the m! rankings: cost of
// transporting the positive part onto the negative part at p = 1.
Rat kr_norm(const GroundMetric& g, const std::vector<Rat>& v);

}  // namespace drvote
