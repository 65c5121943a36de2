#include "drvote/dr_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "drvote/geometry.hpp"
#include "drvote/rng.hpp"

namespace drvote {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

RuleOutcome outcome_from_scores(std::vector<std::pair<SRanking, ExtRat>> scores) {
  if (scores.empty()) fail_domain("rule has no outcomes");
  ExtRat best = scores.front().second;
  for (const auto& [r, s] : scores) best = std::min(best, s);
  if (!best.is_finite()) fail_domain("every consensus class is unreachable under this distance");
  RuleOutcome out;
  for (const auto& [r, s] : scores)
    if (s == best) out.winners.push_back(r);
  out.scores = std::move(scores);
  return out;
}

// --- simplex lp scores ------------------------------------------------------

Rat corner_cost(const PNorm& p, const std::vector<Rat>& x, std::size_t t) {
  if (p.is_inf()) {
    Rat worst = 1 - x[t];
    for (std::size_t i = 0; i < x.size(); ++i)
      if (i != t) worst = std::max(worst, x[i]);
    return worst;
  }
  Rat sum = rat_pow(rat_abs(1 - x[t]), p.p());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (i != t) sum += rat_pow(x[i], p.p());
  return sum;
}

Rat lp_point_cost(const PNorm& p, const std::vector<Rat>& a, const std::vector<Rat>& b) {
  if (a.size() != b.size()) fail_domain("lp distance between different dimensions");
  if (p.is_inf()) {
    Rat worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rat_abs(a[i] - b[i]));
    return worst;
  }
  Rat sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += rat_pow(rat_abs(a[i] - b[i]), p.p());
  return sum;
}

ExtRat simplex_lp_score(const ConsensusSpec& K, const PNorm& p, const SimplexPoint& x,
                        const SRanking& r) {
  const CandidateSet& C = x.candidates;
  if (K.has_ballot_classes()) {
    std::optional<Rat> best;
    for (const Ranking& t : K.ballot_class(C, r)) {
      Rat c = corner_cost(p, x.coords, static_cast<std::size_t>(ranking_index(t)));
      if (!best || c < *best) best = c;
    }
    if (!best) return ExtRat::infinity();
    return ExtRat(*best);
  }
  switch (K.kind()) {
    case ConsensusKind::PointSets: {
      std::optional<Rat> best;
      for (const SimplexPoint& y : K.points_of(r)) {
        Rat c = lp_point_cost(p, x.coords, y.coords);
        if (!best || c < *best) best = c;
      }
      if (!best) return ExtRat::infinity();
      return ExtRat(*best);
    }
    case ConsensusKind::SegmentSets: {
      if (p.is_inf() || p.p() != 2)
        fail_domain("segment classes support the p = 2 simplex distance only");
      std::optional<Rat> best;
      for (const Segment& seg : K.segments_of(r)) {
        Rat c = segment_distance(x, seg).sq_dist;
        if (!best || c < *best) best = c;
      }
      if (!best) return ExtRat::infinity();
      return ExtRat(*best);
    }
    default:
      fail_domain("simplex lp distances need ballot classes or explicit simplex sets");
  }
}

// --- Kantorovich scores -----------------------------------------------------

ExtRat kantorovich_score(const KantorovichSpec& ks, const ConsensusSpec& K, const SimplexPoint& x,
                         const SRanking& r) {
  const CandidateSet& C = x.candidates;
  if (K.has_ballot_classes()) {
    // Transporting everything onto a single corner has forced cost
    // sum_t x_t d(t, corner)^p; minimize over the class corners.
    const auto& all = enumerate_rankings(C.size());
    std::optional<Rat> best;
    for (const Ranking& corner : K.ballot_class(C, r)) {
      Rat cost = 0;
      for (std::size_t i = 0; i < x.coords.size(); ++i) {
        if (x.coords[i] == 0) continue;
        cost += x.coords[i] * rat_pow(ground_distance(ks.ground, all[i], corner), ks.p);
      }
      if (!best || cost < *best) best = cost;
    }
    if (!best) return ExtRat::infinity();
    return ExtRat(*best);
  }
  if (K.kind() == ConsensusKind::PointSets) {
    TransportOptions topt;
    topt.want_coupling = false;
    std::optional<Rat> best;
    for (const SimplexPoint& y : K.points_of(r)) {
      Rat c = wasserstein(ks.ground, ks.p, x, y, topt).cost_pth_power;
      if (!best || c < *best) best = c;
    }
    if (!best) return ExtRat::infinity();
    return ExtRat(*best);
  }
  fail_domain("transport distances need ballot classes or point classes");
}

// --- tournament closed forms ------------------------------------------------

// Margins of class members: `full` pairs (i above j by every voter) carry
// margin n', `strict` pairs (Condorcet wins) any positive margin, all other
// pairs are free up to skew symmetry, shared parity and |margin| <= n'.
struct TournamentClassShape {
  std::vector<std::pair<int, int>> full;
  std::vector<std::pair<int, int>> strict;
  std::vector<std::pair<int, int>> free;
};

TournamentClassShape tournament_class_shape(const ConsensusSpec& K, const CandidateSet& C,
                                            const SRanking& r) {
  const int m = C.size();
  TournamentClassShape shape;
  if (K.kind() == ConsensusKind::Condorcet) {
    const int c = r.at(0);
    for (int b = 0; b < m; ++b)
      if (b != c) shape.strict.push_back({c, b});
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (i != c && j != c) shape.free.push_back({i, j});
    return shape;
  }
  if (K.kind() == ConsensusKind::StrongUnanimity || K.kind() == ConsensusKind::WeakUnanimity) {
    std::vector<int> pos(m, -1);
    for (int i = 0; i < r.size(); ++i) pos[r.at(i)] = i;
    // i sits in the shared prefix above j for every member ballot; each
    // unordered pair appears once, ordered (above, below).
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        if (pos[i] >= 0 && (pos[j] < 0 || pos[i] < pos[j])) shape.full.push_back({i, j});
      }
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (pos[i] < 0 && pos[j] < 0) shape.free.push_back({i, j});
    return shape;
  }
  fail_domain("tournament distances support unanimity prefixes and majority classes only");
}

long long free_pair_cost(long long v, long long np) {
  const long long av = std::llabs(v);
  if (av > np) return av - np;
  return ((av - np) % 2 == 0) ? 0 : 1;
}

long long strict_pair_cost(long long v, long long np) {
  if (v > np) return v - np;
  if (v >= 1) return ((v - np) % 2 == 0) ? 0 : 1;
  return (np % 2 == 1) ? 1 - v : 2 - v;
}

long long tournament_class_score(const TournamentSpec& spec, const ConsensusSpec& K,
                                 const TournamentMatrix& T, const SRanking& r) {
  const TournamentClassShape shape = tournament_class_shape(K, T.candidates, r);
  if (spec.reduced) {
    long long total = 0;
    for (auto [i, j] : shape.full) {
      const long long v = T.at(i, j);
      total += v > 0 ? 0 : (v == 0 ? 1 : 2);
    }
    for (auto [i, j] : shape.strict) {
      const long long v = T.at(i, j);
      total += v > 0 ? 0 : (v == 0 ? 1 : 2);
    }
    return 2 * total;  // matrix distance counts (i,j) and (j,i)
  }
  long long vmax = 1;
  for (long long e : T.entries) vmax = std::max(vmax, std::llabs(e));
  long long best = -1;
  for (long long np = 1; np <= vmax + 2; ++np) {
    long long total = 0;
    for (auto [i, j] : shape.full) total += std::llabs(T.at(i, j) - np);
    for (auto [i, j] : shape.strict) total += strict_pair_cost(T.at(i, j), np);
    for (auto [i, j] : shape.free) total += free_pair_cost(T.at(i, j), np);
    if (best < 0 || total < best) best = total;
  }
  return 2 * best;
}

std::string distance_token(const RuleDistance& d) {
  return std::visit(
      overloaded{
          [](const VotewiseSpec& vw) { return vw.key(); },
          [](const TournamentSpec& ts) { return std::string(ts.reduced ? "rt" : "t"); },
          [](const SimplexLp& lp) { return "lp:p=" + lp.p.str(); },
          [](const KantorovichSpec& ks) {
            return "wass:" + ks.ground.key() + "|p=" + std::to_string(ks.p);
          },
      },
      d);
}

}  // namespace

std::string RuleSpec::name() const {
  return "dr(" + consensus.key() + "," + distance_token(distance) + ")";
}

RuleOutcome dr_outcome(const RuleSpec& R, const AnonymousProfile& E) {
  const CandidateSet& C = E.candidates;
  const std::vector<SRanking> outs = R.consensus.outcomes(C);
  std::vector<std::pair<SRanking, ExtRat>> scores;
  scores.reserve(outs.size());
  std::visit(
      overloaded{
          [&](const VotewiseSpec& vw) {
            for (const SRanking& r : outs)
              scores.push_back({r, distance_to_consensus(R.consensus, vw, E, r)});
          },
          [&](const TournamentSpec& ts) {
            const TournamentMatrix T = tournament_matrix(E);
            for (const SRanking& r : outs)
              scores.push_back({r, ExtRat(rat_of(tournament_class_score(ts, R.consensus, T, r)))});
          },
          [&](const SimplexLp& lp) {
            const SimplexPoint x = vote_distribution(E);
            for (const SRanking& r : outs)
              scores.push_back({r, simplex_lp_score(R.consensus, lp.p, x, r)});
          },
          [&](const KantorovichSpec& ks) {
            const SimplexPoint x = vote_distribution(E);
            for (const SRanking& r : outs)
              scores.push_back({r, kantorovich_score(ks, R.consensus, x, r)});
          },
      },
      R.distance);
  return outcome_from_scores(std::move(scores));
}

RuleOutcome dr_outcome(const RuleSpec& R, const SimplexPoint& x) {
  const std::vector<SRanking> outs = R.consensus.outcomes(x.candidates);
  std::vector<std::pair<SRanking, ExtRat>> scores;
  scores.reserve(outs.size());
  std::visit(
      overloaded{
          [&](const VotewiseSpec&) -> void {
            fail_domain("votewise rules evaluate profiles; realize the point first");
          },
          [&](const TournamentSpec&) -> void {
            fail_domain("tournament rules evaluate profiles; realize the point first");
          },
          [&](const SimplexLp& lp) {
            for (const SRanking& r : outs)
              scores.push_back({r, simplex_lp_score(R.consensus, lp.p, x, r)});
          },
          [&](const KantorovichSpec& ks) {
            for (const SRanking& r : outs)
              scores.push_back({r, kantorovich_score(ks, R.consensus, x, r)});
          },
      },
      R.distance);
  return outcome_from_scores(std::move(scores));
}

RuleOutcome simplex_lp_rule(int s, PNorm p, const SimplexPoint& x) {
  const int m = x.candidates.size();
  if (s < 1 || s > m) fail_domain("outcome arity out of range");
  const auto& rankings = enumerate_rankings(m);
  Rat top = 0;
  for (const Rat& c : x.coords) top = std::max(top, c);
  std::vector<SRanking> closed_form;
  for (std::size_t i = 0; i < x.coords.size(); ++i)
    if (x.coords[i] == top) closed_form.push_back(SRanking::prefix_of(rankings[i], s));
  std::sort(closed_form.begin(), closed_form.end());
  closed_form.erase(std::unique(closed_form.begin(), closed_form.end()), closed_form.end());

  const ConsensusSpec K = ConsensusSpec::strong_unanimity(s);
  std::vector<std::pair<SRanking, ExtRat>> scores;
  for (const SRanking& r : K.outcomes(x.candidates))
    scores.push_back({r, simplex_lp_score(K, p, x, r)});
  RuleOutcome out = outcome_from_scores(std::move(scores));
  if (out.winners != closed_form)
    fail_internal("corner rule closed form disagrees with direct minimization");
  return out;
}

// --- oracle rules -----------------------------------------------------------

std::string OracleSpec::name() const {
  switch (rule) {
    case OracleRule::Borda:
      return "borda";
    case OracleRule::Plurality:
      return "plurality";
    case OracleRule::KApproval:
      return "approval:" + std::to_string(k);
    case OracleRule::Scoring: {
      std::string s = "scoring:";
      for (std::size_t i = 0; i < weights.size(); ++i)
        s += (i ? "," : "") + format_rat(weights[i]);
      return s;
    }
    case OracleRule::Kemeny:
      return "kemeny";
    case OracleRule::Copeland:
      return "copeland";
    case OracleRule::ModalRanking:
      return "modal";
  }
  fail_internal("unknown oracle rule");
}

RuleOutcome oracle_rule(const OracleSpec& oracle, const AnonymousProfile& E) {
  const CandidateSet& C = E.candidates;
  const int m = C.size();
  const long long n = E.n();
  const auto& rankings = enumerate_rankings(m);
  std::vector<std::pair<SRanking, ExtRat>> scores;

  auto candidate_scores = [&](const std::function<Rat(int)>& score) {
    for (int c = 0; c < m; ++c) scores.push_back({SRanking::of_candidate(c), ExtRat(score(c))});
  };

  switch (oracle.rule) {
    case OracleRule::Borda:
      candidate_scores([&](int c) {
        long long total = 0;
        for (std::size_t i = 0; i < rankings.size(); ++i)
          total += E.counts[i] * (m - rankings[i].rank_of(c));
        return rat_of(n * (m - 1) - total);
      });
      break;
    case OracleRule::Plurality:
      candidate_scores([&](int c) {
        long long tops = 0;
        for (std::size_t i = 0; i < rankings.size(); ++i)
          if (rankings[i].at(0) == c) tops += E.counts[i];
        return rat_of(n - tops);
      });
      break;
    case OracleRule::KApproval: {
      if (oracle.k < 1 || oracle.k > m) fail_domain("approval prefix size out of range");
      candidate_scores([&](int c) {
        long long approvals = 0;
        for (std::size_t i = 0; i < rankings.size(); ++i)
          if (rankings[i].rank_of(c) <= oracle.k) approvals += E.counts[i];
        return rat_of(n - approvals);
      });
      break;
    }
    case OracleRule::Scoring: {
      const auto& w = oracle.weights;
      if (static_cast<int>(w.size()) != m) fail_domain("scoring rule needs one weight per rank");
      for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] > w[i - 1]) fail_domain("scoring weights must be nonincreasing");
      candidate_scores([&](int c) {
        Rat total = 0;
        for (std::size_t i = 0; i < rankings.size(); ++i)
          total += rat_of(E.counts[i]) * w[rankings[i].rank_of(c) - 1];
        return Rat(rat_of(n) * w[0] - total);
      });
      break;
    }
    case OracleRule::Kemeny: {
      const GroundMetric kendall = GroundMetric::kendall();
      for (const Ranking& r : rankings) {
        Rat total = 0;
        for (std::size_t i = 0; i < rankings.size(); ++i) {
          if (E.counts[i] == 0) continue;
          total += rat_of(E.counts[i]) * ground_distance(kendall, rankings[i], r);
        }
        scores.push_back({SRanking::prefix_of(r, m), ExtRat(total)});
      }
      break;
    }
    case OracleRule::Copeland: {
      const TournamentMatrix T = tournament_matrix(E);
      candidate_scores([&](int c) {
        long long points = 0;  // win 2, tie 1, loss 0
        for (int b = 0; b < m; ++b) {
          if (b == c) continue;
          const long long v = T.at(c, b);
          points += v > 0 ? 2 : (v == 0 ? 1 : 0);
        }
        return rat_of(2 * (m - 1) - points);
      });
      break;
    }
    case OracleRule::ModalRanking:
      for (std::size_t i = 0; i < rankings.size(); ++i)
        scores.push_back({SRanking::prefix_of(rankings[i], m), ExtRat(rat_of(n - E.counts[i]))});
      break;
  }
  return outcome_from_scores(std::move(scores));
}

// --- identities -------------------------------------------------------------

namespace {

std::string profile_line(const AnonymousProfile& E) {
  const auto& rankings = enumerate_rankings(E.candidates.size());
  std::string s;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    if (E.counts[i] == 0) continue;
    if (!s.empty()) s += " ";
    s += std::to_string(E.counts[i]) + ":" + format_ranking(E.candidates, rankings[i]);
  }
  return s.empty() ? "(empty)" : s;
}

std::string winners_line(const CandidateSet& C, const std::vector<SRanking>& ws) {
  std::string s = "{";
  for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? ", " : "") + format_sranking(C, ws[i]);
  return s + "}";
}

bool identity_case(const RuleSpec& lhs, const OracleSpec& rhs, const AnonymousProfile& E,
                   IdentityReport& report) {
  const RuleOutcome a = dr_outcome(lhs, E);
  const RuleOutcome b = oracle_rule(rhs, E);
  ++report.cases_checked;
  if (a.winners == b.winners) return true;
  report.equal = false;
  report.mismatch = E;
  report.detail = "winners differ on [" + profile_line(E) + "]: " + lhs.name() + "=" +
                  winners_line(E.candidates, a.winners) + " " + rhs.name() + "=" +
                  winners_line(E.candidates, b.winners);
  return false;
}

}  // namespace

void for_each_anonymous_profile(int m, long long n,
                                const std::function<void(const AnonymousProfile&)>& fn) {
  const long long M = factorial(m);
  const CandidateSet C = CandidateSet::alphabet(m);
  std::vector<long long> counts(static_cast<std::size_t>(M), 0);
  AnonymousProfile E{C, counts};
  auto rec = [&](auto&& self, std::size_t idx, long long remaining) -> void {
    if (idx + 1 == E.counts.size()) {
      E.counts[idx] = remaining;
      fn(E);
      E.counts[idx] = 0;
      return;
    }
    for (long long v = 0; v <= remaining; ++v) {
      E.counts[idx] = v;
      self(self, idx + 1, remaining - v);
    }
    E.counts[idx] = 0;
  };
  rec(rec, 0, n);
}

IdentityReport check_identity(const RuleSpec& lhs, const OracleSpec& rhs, int m, long long n_max,
                              long long n_min) {
  IdentityReport report;
  for (long long n = n_min; n <= n_max && report.equal; ++n) {
    for_each_anonymous_profile(m, n, [&](const AnonymousProfile& E) {
      if (!report.equal) return;
      identity_case(lhs, rhs, E, report);
    });
  }
  return report;
}

IdentityReport check_identity_sampled(const RuleSpec& lhs, const OracleSpec& rhs, int m,
                                      long long n, int samples, std::uint64_t seed) {
  IdentityReport report;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples && report.equal; ++i) {
    const AnonymousProfile E = sample_profile(m, n, Culture::ImpartialCulture, rng);
    identity_case(lhs, rhs, E, report);
  }
  return report;
}

// --- sampling ---------------------------------------------------------------

AnonymousProfile sample_profile(int m, long long n, Culture culture, std::mt19937_64& rng) {
  if (n < 1) fail_domain("profiles need at least one voter");
  const long long M = factorial(m);
  std::vector<long long> counts(static_cast<std::size_t>(M), 0);
  if (culture == Culture::ImpartialCulture) {
    for (long long i = 0; i < n; ++i)
      ++counts[uniform_below(rng, static_cast<std::uint64_t>(M))];
  } else {
    Int total;
    mpz_bin_uiui(total.get_mpz_t(), static_cast<unsigned long>(n + M - 1),
                 static_cast<unsigned long>(M - 1));
    Int idx = uniform_below_int(rng, total);
    long long remaining = n;
    for (long long t = 0; t + 1 < M; ++t) {
      const long long parts_left = M - t - 1;
      Int b;  // compositions of `remaining` into parts_left parts after counts[t] = 0
      mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(remaining + parts_left - 1),
                   static_cast<unsigned long>(parts_left - 1));
      long long v = 0;
      while (idx >= b) {
        idx -= b;
        const long long s = remaining - v;  // > 0 while idx can still exceed b
        b *= int_of(s);
        b /= int_of(s + parts_left - 1);
        ++v;
      }
      counts[static_cast<std::size_t>(t)] = v;
      remaining -= v;
    }
    counts[static_cast<std::size_t>(M - 1)] = remaining;
  }
  return AnonymousProfile{CandidateSet::alphabet(m), std::move(counts)};
}

bool boundary_membership(const RuleSpec& R, const AnonymousProfile& E) {
  return dr_outcome(R, E).winners.size() >= 2;
}

BoundaryEstimate boundary_fraction(const RuleSpec& R, int m, long long n, Culture culture,
                                   long long trials, std::uint64_t seed, int threads) {
  if (trials < 1) fail_domain("need at least one trial");
  constexpr long long kBlock = 256;
  const long long nblocks = (trials + kBlock - 1) / kBlock;
  threads = static_cast<int>(std::max<long long>(1, std::min<long long>(threads, nblocks)));

  std::atomic<long long> next{0};
  std::vector<long long> tie_counts(static_cast<std::size_t>(threads), 0);
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&](int tid) {
    try {
      long long b;
      while ((b = next.fetch_add(1)) < nblocks) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        const long long count = std::min(kBlock, trials - b * kBlock);
        for (long long i = 0; i < count; ++i) {
          const AnonymousProfile E = sample_profile(m, n, culture, rng);
          if (boundary_membership(R, E)) ++tie_counts[static_cast<std::size_t>(tid)];
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  BoundaryEstimate est;
  est.trials = trials;
  for (long long c : tie_counts) est.ties += c;
  est.fraction = make_rat(int_of(est.ties), int_of(trials));
  const double phat = static_cast<double>(est.ties) / static_cast<double>(trials);
  est.conf_radius = 1.959964 * std::sqrt(phat * (1.0 - phat) / static_cast<double>(trials));
  return est;
}

// --- diagnostics ------------------------------------------------------------

namespace {

Ranking relabel_ranking(const Ranking& t, const std::vector<int>& perm) {
  std::vector<int> order(t.order().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = perm[static_cast<std::size_t>(t.at(static_cast<int>(i)))];
  return Ranking(order);
}

SRanking relabel_sranking(const SRanking& r, const std::vector<int>& perm) {
  std::vector<int> prefix(r.prefix());
  for (int& c : prefix) c = perm[static_cast<std::size_t>(c)];
  return SRanking(prefix);
}

AnonymousProfile relabel_profile(const AnonymousProfile& E, const std::vector<int>& perm) {
  const auto& rankings = enumerate_rankings(E.candidates.size());
  std::vector<long long> counts(E.counts.size(), 0);
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    if (E.counts[i] == 0) continue;
    counts[static_cast<std::size_t>(ranking_index(relabel_ranking(rankings[i], perm)))] +=
        E.counts[i];
  }
  return AnonymousProfile{E.candidates, std::move(counts)};
}

SimplexPoint relabel_point(const SimplexPoint& x, const std::vector<int>& perm) {
  const auto& rankings = enumerate_rankings(x.candidates.size());
  std::vector<Rat> coords(x.coords.size(), Rat(0));
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    if (x.coords[i] == 0) continue;
    coords[static_cast<std::size_t>(ranking_index(relabel_ranking(rankings[i], perm)))] +=
        x.coords[i];
  }
  return SimplexPoint{x.candidates, std::move(coords)};
}

std::string perm_line(const CandidateSet& C, const std::vector<int>& perm) {
  std::string s = "(";
  for (std::size_t i = 0; i < perm.size(); ++i)
    s += (i ? " " : "") + C.name(static_cast<int>(i)) + "->" + C.name(perm[i]);
  return s + ")";
}

std::string label_line(const CandidateSet& C, const std::optional<SRanking>& r) {
  return r ? format_sranking(C, *r) : "none";
}

std::string point_line(const SimplexPoint& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.coords.size(); ++i) s += (i ? ", " : "") + format_rat(x.coords[i]);
  return s + ")";
}

std::optional<SRanking> safe_membership(const ConsensusSpec& K, const SimplexPoint& x,
                                        bool* ambiguous) {
  try {
    return membership(K, x);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Domain) {
      if (ambiguous) *ambiguous = true;
      return std::nullopt;
    }
    throw;
  }
}

SimplexPoint corner_point(const CandidateSet& C, std::size_t index) {
  std::vector<Rat> coords(static_cast<std::size_t>(factorial(C.size())), Rat(0));
  coords[index] = 1;
  return SimplexPoint{C, std::move(coords)};
}

SimplexPoint midpoint(const SimplexPoint& a, const SimplexPoint& b) {
  std::vector<Rat> coords(a.coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = (a.coords[i] + b.coords[i]) / 2;
  return SimplexPoint{a.candidates, std::move(coords)};
}

SimplexPoint segment_point(const Segment& seg, const Rat& t) {
  std::vector<Rat> coords(seg.a.coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i)
    coords[i] = seg.a.coords[i] + t * (seg.b.coords[i] - seg.a.coords[i]);
  return SimplexPoint{seg.a.candidates, std::move(coords)};
}

// Knife-edge pair at odd n, m = 3: the first profile has Condorcet winner a,
// flipping a single abc ballot to bac hands the win to b. Vote distributions
// are 1/n apart in total variation.
std::pair<AnonymousProfile, AnonymousProfile> condorcet_knife_edge(const CandidateSet& C,
                                                                   long long n) {
  if (C.size() != 3 || n < 1 || n % 2 == 0) fail_domain("knife-edge pairs need m = 3 and odd n");
  const long long k = n / 6;
  std::vector<long long> counts;
  switch (n % 6) {
    case 1:
      counts = {k + 1, k, k, k, k, k};
      break;
    case 3:
      counts = {k + 1, k + 1, k + 1, k, k, k};
      break;
    default:  // 5
      counts = {k + 1, k + 1, k + 1, k + 1, k + 1, k};
      break;
  }
  AnonymousProfile a{C, counts};
  counts[0] -= 1;
  counts[2] += 1;
  AnonymousProfile b{C, std::move(counts)};
  return {std::move(a), std::move(b)};
}

// Class members used as deterministic probes, per class label.
std::map<SRanking, std::vector<SimplexPoint>> diag_class_points(const ConsensusSpec& K,
                                                                const CandidateSet& C,
                                                                const DiagnosticsOptions& opts) {
  std::map<SRanking, std::vector<SimplexPoint>> out;
  const int m = C.size();
  std::mt19937_64 rng(derive_seed(opts.seed, 101));
  if (K.has_ballot_classes()) {
    for (const SRanking& r : K.outcomes(C)) {
      auto& list = out[r];
      const auto members = K.ballot_class(C, r);
      for (const Ranking& t : members)
        list.push_back(corner_point(C, static_cast<std::size_t>(ranking_index(t))));
      // a few strictly mixed points of the class face
      for (int rep = 0; rep < 3 && members.size() > 1; ++rep) {
        const long long d = 3 + static_cast<long long>(uniform_below(rng, 8));
        std::vector<Rat> coords(static_cast<std::size_t>(factorial(m)), Rat(0));
        for (long long i = 0; i < d; ++i) {
          const auto& t = members[uniform_below(rng, members.size())];
          coords[static_cast<std::size_t>(ranking_index(t))] += make_rat(1, d);
        }
        list.push_back(SimplexPoint{C, std::move(coords)});
      }
    }
    return out;
  }
  if (K.is_simplex_sets()) {
    for (const SRanking& r : K.outcomes(C)) {
      auto& list = out[r];
      if (K.kind() == ConsensusKind::PointSets) {
        for (const SimplexPoint& p : K.points_of(r)) list.push_back(p);
      } else {
        for (const Segment& seg : K.segments_of(r)) {
          if (seg.a_closed) list.push_back(seg.a);
          if (seg.b_closed) list.push_back(seg.b);
          list.push_back(segment_point(seg, make_rat(1, 2)));
          list.push_back(segment_point(seg, make_rat(1, 4)));
          list.push_back(segment_point(seg, make_rat(3, 4)));
        }
      }
    }
    return out;
  }
  // Condorcet: bucket random points, then add knife-edge pairs at m = 3.
  for (int i = 0; i < std::max(24, opts.samples); ++i) {
    const long long d = 1 + static_cast<long long>(uniform_below(rng, 12));
    const SimplexPoint x = vote_distribution(sample_profile(m, d, Culture::ImpartialCulture, rng));
    if (auto c = condorcet_winner(x)) out[SRanking::of_candidate(*c)].push_back(x);
  }
  if (m == 3) {
    for (long long n : {3LL, 5LL, 7LL, 9LL}) {
      auto [ea, eb] = condorcet_knife_edge(C, n);
      out[SRanking::of_candidate(0)].push_back(vote_distribution(ea));
      out[SRanking::of_candidate(1)].push_back(vote_distribution(eb));
    }
  }
  return out;
}

// Deterministic member profiles plus seeded random profiles (class or not).
std::vector<AnonymousProfile> diag_profiles(const ConsensusSpec& K, const CandidateSet& C,
                                            const DiagnosticsOptions& opts) {
  std::vector<AnonymousProfile> out;
  const int m = C.size();
  const std::size_t M = static_cast<std::size_t>(factorial(m));
  if (K.has_ballot_classes()) {
    for (const SRanking& r : K.outcomes(C)) {
      const auto members = K.ballot_class(C, r);
      std::vector<long long> counts(M, 0);
      for (const Ranking& t : members) counts[static_cast<std::size_t>(ranking_index(t))] = 1;
      out.push_back(AnonymousProfile{C, counts});
      std::vector<long long> single(M, 0);
      single[static_cast<std::size_t>(ranking_index(members.front()))] = 2;
      out.push_back(AnonymousProfile{C, std::move(single)});
    }
  } else if (K.kind() == ConsensusKind::Condorcet) {
    const auto& rankings = enumerate_rankings(m);
    for (std::size_t i = 0; i < rankings.size(); ++i) {
      std::vector<long long> counts(M, 0);
      counts[i] = 1;
      out.push_back(AnonymousProfile{C, std::move(counts)});
    }
    if (m == 3) {
      auto [ea, eb] = condorcet_knife_edge(C, 7);
      out.push_back(ea);
      out.push_back(eb);
    }
  } else {
    // realize the reference points of each simplex class where possible
    for (const auto& [r, pts] : diag_class_points(K, C, opts)) {
      for (const SimplexPoint& x : pts) {
        const Int den = lcm_of_denominators(x.coords);
        if (den > 64) continue;
        const long long n = den.get_si();
        out.push_back(realize(x, n));
        out.push_back(realize(x, 2 * n));
      }
    }
  }
  std::mt19937_64 rng(derive_seed(opts.seed, 202));
  const int extra = std::min(opts.samples, 64);
  for (int i = 0; i < extra; ++i) {
    const long long n = 1 + static_cast<long long>(
                                uniform_below(rng, static_cast<std::uint64_t>(opts.n_max)));
    out.push_back(sample_profile(m, n, Culture::ImpartialCulture, rng));
  }
  return out;
}

std::vector<std::vector<int>> diag_permutations(int m, const DiagnosticsOptions& opts) {
  std::vector<std::vector<int>> perms;
  std::vector<int> p(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] = i;
  if (m <= 4) {
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return perms;
  }
  std::mt19937_64 rng(derive_seed(opts.seed, 303));
  for (int rep = 0; rep < 24; ++rep) {
    for (std::size_t i = p.size(); i > 1; --i)
      std::swap(p[i - 1], p[uniform_below(rng, i)]);
    perms.push_back(p);
  }
  return perms;
}

CheckResult check_neutrality(const ConsensusSpec& K, const CandidateSet& C,
                             const DiagnosticsOptions& opts) {
  CheckResult res{DiagCheck::Neutrality, true, "", {}, {}};
  const auto perms = diag_permutations(C.size(), opts);
  long long cases = 0;
  if (K.is_simplex_sets()) {
    auto class_points = diag_class_points(K, C, opts);
    std::vector<SimplexPoint> probes;
    for (const auto& [r, pts] : class_points)
      for (const SimplexPoint& x : pts) probes.push_back(x);
    std::mt19937_64 rng(derive_seed(opts.seed, 404));
    for (int i = 0; i < 16; ++i)
      probes.push_back(vote_distribution(
          sample_profile(C.size(), 1 + static_cast<long long>(uniform_below(rng, 8)),
                         Culture::ImpartialCulture, rng)));
    for (const SimplexPoint& x : probes) {
      bool ambiguous = false;
      const auto base = safe_membership(K, x, &ambiguous);
      if (ambiguous) continue;
      for (const auto& perm : perms) {
        ++cases;
        bool amb2 = false;
        const auto got = safe_membership(K, relabel_point(x, perm), &amb2);
        const auto want = base ? std::optional<SRanking>(relabel_sranking(*base, perm))
                               : std::nullopt;
        if (amb2 || got != want) {
          res.pass = false;
          res.detail = "relabeling " + perm_line(C, perm) + " maps point " + point_line(x) +
                       " from class " + label_line(C, base) + " to " +
                       (amb2 ? std::string("ambiguous") : label_line(C, got));
          res.witness_points = {x, relabel_point(x, perm)};
          return res;
        }
      }
    }
  } else {
    for (const AnonymousProfile& E : diag_profiles(K, C, opts)) {
      const auto base = membership(K, E);
      for (const auto& perm : perms) {
        ++cases;
        const auto got = membership(K, relabel_profile(E, perm));
        const auto want =
            base ? std::optional<SRanking>(relabel_sranking(*base, perm)) : std::nullopt;
        if (got != want) {
          res.pass = false;
          res.detail = "relabeling " + perm_line(C, perm) + " maps [" + profile_line(E) +
                       "] from class " + label_line(C, base) + " to " + label_line(C, got);
          return res;
        }
      }
    }
  }
  res.detail = std::to_string(cases) + " relabeled cases agree";
  return res;
}

CheckResult check_homogeneity(const ConsensusSpec& K, const CandidateSet& C,
                              const DiagnosticsOptions& opts) {
  CheckResult res{DiagCheck::Homogeneity, true, "", {}, {}};
  long long cases = 0;
  for (const AnonymousProfile& E : diag_profiles(K, C, opts)) {
    const auto base = membership(K, E);
    for (long long k : {2LL, 3LL}) {
      ++cases;
      std::vector<long long> scaled(E.counts);
      for (long long& c : scaled) c *= k;
      const auto got = membership(K, AnonymousProfile{C, std::move(scaled)});
      if (got != base) {
        res.pass = false;
        res.detail = "replicating [" + profile_line(E) + "] x" + std::to_string(k) +
                     " moves class " + label_line(C, base) + " to " + label_line(C, got);
        return res;
      }
    }
  }
  res.detail = std::to_string(cases) + " replications agree";
  return res;
}

CheckResult check_convexity(const ConsensusSpec& K, const CandidateSet& C,
                            const DiagnosticsOptions& opts) {
  CheckResult res{DiagCheck::Convexity, true, "", {}, {}};
  long long cases = 0;
  auto class_points = diag_class_points(K, C, opts);
  std::mt19937_64 rng(derive_seed(opts.seed, 505));
  for (const auto& [r, pts] : class_points) {
    const std::size_t cap = std::min<std::size_t>(pts.size(), 10);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < cap; ++i)
      for (std::size_t j = i; j < cap; ++j) pairs.push_back({i, j});
    for (int rep = 0; rep < 8 && pts.size() > cap; ++rep)
      pairs.push_back({uniform_below(rng, pts.size()), uniform_below(rng, pts.size())});
    for (auto [i, j] : pairs) {
      ++cases;
      const SimplexPoint mid = midpoint(pts[i], pts[j]);
      bool ambiguous = false;
      const auto got = safe_membership(K, mid, &ambiguous);
      if (ambiguous || !got || !(*got == r)) {
        res.pass = false;
        res.detail = "midpoint of " + point_line(pts[i]) + " and " + point_line(pts[j]) +
                     " leaves class " + format_sranking(C, r) + ": midpoint " + point_line(mid) +
                     " lies in " + (ambiguous ? std::string("ambiguous") : label_line(C, got));
        res.witness_points = {pts[i], pts[j], mid};
        return res;
      }
    }
  }
  res.detail = std::to_string(cases) + " midpoints stay in class";
  return res;
}

CheckResult check_consistency(const ConsensusSpec& K, const CandidateSet& C,
                              const DiagnosticsOptions& opts) {
  CheckResult res{DiagCheck::Consistency, true, "", {}, {}};
  long long cases = 0;
  std::map<SRanking, std::vector<AnonymousProfile>> by_class;
  for (const AnonymousProfile& E : diag_profiles(K, C, opts)) {
    if (auto r = membership(K, E)) by_class[*r].push_back(E);
  }
  for (const auto& [r, list] : by_class) {
    const std::size_t cap = std::min<std::size_t>(list.size(), 10);
    for (std::size_t i = 0; i < cap; ++i) {
      for (std::size_t j = i; j < cap; ++j) {
        ++cases;
        std::vector<long long> counts(list[i].counts);
        for (std::size_t t = 0; t < counts.size(); ++t) counts[t] += list[j].counts[t];
        const auto got = membership(K, AnonymousProfile{C, std::move(counts)});
        if (!got || !(*got == r)) {
          res.pass = false;
          res.detail = "concatenating [" + profile_line(list[i]) + "] and [" +
                       profile_line(list[j]) + "] leaves class " + format_sranking(C, r) +
                       " for " + label_line(C, got);
          return res;
        }
      }
    }
  }
  res.detail = std::to_string(cases) + " concatenations stay in class";
  return res;
}

CheckResult check_separation(const ConsensusSpec& K, const CandidateSet& C,
                             const DiagnosticsOptions& opts) {
  CheckResult res{DiagCheck::Separation, true, "", {}, {}};
  const int m = C.size();
  std::mt19937_64 rng(derive_seed(opts.seed, 606));
  std::vector<std::pair<SRanking, SimplexPoint>> pool;
  std::optional<Rat> best;
  SimplexPoint best_a, best_b;

  auto add_point = [&](const SRanking& r, const SimplexPoint& x) {
    for (const auto& [r2, y] : pool) {
      if (r2 == r) continue;
      const Rat d = total_variation(x, y);
      if (!best || d < *best) {
        best = d;
        best_a = x;
        best_b = y;
      }
    }
    pool.push_back({r, x});
  };

  auto sample_class_points = [&](long long d) {
    if (K.has_ballot_classes()) {
      for (const SRanking& r : K.outcomes(C)) {
        const auto members = K.ballot_class(C, r);
        if (d == 2)  // corners once
          for (const Ranking& t : members)
            add_point(r, corner_point(C, static_cast<std::size_t>(ranking_index(t))));
        std::vector<Rat> coords(static_cast<std::size_t>(factorial(m)), Rat(0));
        for (long long i = 0; i < d; ++i)
          coords[static_cast<std::size_t>(
              ranking_index(members[uniform_below(rng, members.size())]))] += make_rat(1, d);
        add_point(r, SimplexPoint{C, std::move(coords)});
      }
      return;
    }
    if (K.is_simplex_sets()) {
      for (const SRanking& r : K.outcomes(C)) {
        if (K.kind() == ConsensusKind::PointSets) {
          if (d == 2)
            for (const SimplexPoint& p : K.points_of(r)) add_point(r, p);
          continue;
        }
        for (const Segment& seg : K.segments_of(r)) {
          const long long j_lo = seg.a_closed ? 0 : 1;
          const long long j_hi = seg.b_closed ? d : d - 1;
          for (long long j = j_lo; j <= j_hi; j += std::max<long long>(1, d / 3))
            add_point(r, segment_point(seg, make_rat(j, d)));
        }
      }
      return;
    }
    // Condorcet
    for (int rep = 0; rep < 3; ++rep) {
      const SimplexPoint x =
          vote_distribution(sample_profile(m, d, Culture::ImpartialCulture, rng));
      if (auto c = condorcet_winner(x)) add_point(SRanking::of_candidate(*c), x);
    }
    if (m == 3 && d % 2 == 1) {
      auto [ea, eb] = condorcet_knife_edge(C, d);
      add_point(SRanking::of_candidate(0), vote_distribution(ea));
      add_point(SRanking::of_candidate(1), vote_distribution(eb));
    }
  };

  for (long long d = 2; d <= opts.denominator_max; ++d) {
    sample_class_points(d);
    if (best) res.separation_schedule.push_back({d, *best});
  }
  if (!best) {
    res.detail = "no cross-class samples found";
    return res;
  }
  res.pass = *best >= opts.separation_threshold;
  res.detail = "minimum cross-class total variation observed: " + format_rat(*best) +
               (res.pass ? " (>= " : " (< ") + format_rat(opts.separation_threshold) + ")";
  res.witness_points = {best_a, best_b};
  return res;
}

}  // namespace

std::string diag_check_name(DiagCheck c) {
  switch (c) {
    case DiagCheck::Neutrality:
      return "neutrality";
    case DiagCheck::Homogeneity:
      return "homogeneity";
    case DiagCheck::Convexity:
      return "convexity";
    case DiagCheck::Separation:
      return "separation";
    case DiagCheck::Consistency:
      return "consistency";
  }
  fail_internal("unknown diagnostic check");
}

bool DiagnosticsReport::all_pass() const {
  for (const CheckResult& r : results)
    if (!r.pass) return false;
  return true;
}

DiagnosticsReport consensus_diagnostics(const ConsensusSpec& K,
                                        const std::vector<DiagCheck>& checks,
                                        const DiagnosticsOptions& opts) {
  const CandidateSet C = K.fixed_candidates().value_or(CandidateSet::alphabet(opts.m));
  DiagnosticsReport report;
  for (DiagCheck c : checks) {
    switch (c) {
      case DiagCheck::Neutrality:
        report.results.push_back(check_neutrality(K, C, opts));
        break;
      case DiagCheck::Homogeneity:
        report.results.push_back(check_homogeneity(K, C, opts));
        break;
      case DiagCheck::Convexity:
        report.results.push_back(check_convexity(K, C, opts));
        break;
      case DiagCheck::Separation:
        report.results.push_back(check_separation(K, C, opts));
        break;
      case DiagCheck::Consistency:
        report.results.push_back(check_consistency(K, C, opts));
        break;
    }
  }
  return report;
}

ConsensusSpec nonconvex_example_consensus() {
  const CandidateSet C = CandidateSet::alphabet(3);
  // lexicographic ranking order: abc acb bac bca cab cba
  auto point = [&](std::initializer_list<std::pair<int, Rat>> mass) {
    std::vector<Rat> coords(6, Rat(0));
    for (const auto& [i, v] : mass) coords[static_cast<std::size_t>(i)] = v;
    return make_simplex_point(C, std::move(coords));
  };
  const Rat half = make_rat(1, 2);
  std::map<SRanking, std::vector<Segment>> classes;
  // each class: the face where the candidate tops every ballot, plus one
  // point where the candidate is ranked last by everyone
  classes[SRanking::of_candidate(0)] = {
      Segment{point({{0, Rat(1)}}), point({{1, Rat(1)}}), true, true},
      Segment{point({{3, half}, {5, half}}), point({{3, half}, {5, half}}), true, true},
  };
  classes[SRanking::of_candidate(1)] = {
      Segment{point({{2, Rat(1)}}), point({{3, Rat(1)}}), true, true},
      Segment{point({{1, half}, {4, half}}), point({{1, half}, {4, half}}), true, true},
  };
  classes[SRanking::of_candidate(2)] = {
      Segment{point({{4, Rat(1)}}), point({{5, Rat(1)}}), true, true},
      Segment{point({{0, half}, {2, half}}), point({{0, half}, {2, half}}), true, true},
  };
  return ConsensusSpec::segment_sets(C, std::move(classes));
}

}  // namespace drvote
