#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "drvote/dr_engine.hpp"
#include "drvote/rng.hpp"

using namespace drvote;

namespace {

RuleSpec votewise_rule(ConsensusSpec K, GroundMetric g, PNorm p) {
  return RuleSpec{std::move(K), VotewiseSpec{std::move(g), p, false}};
}

std::vector<std::string> winner_names(const CandidateSet& C, const RuleOutcome& out) {
  std::vector<std::string> names;
  for (const SRanking& r : out.winners) names.push_back(format_sranking(C, r));
  return names;
}

// Minimum tournament distance from E to the class of r, by enumerating every
// profile with up to max_n voters and checking membership directly.
long long tournament_class_bruteforce(const ConsensusSpec& K, const TournamentSpec& spec,
                                      const AnonymousProfile& E, const SRanking& r,
                                      long long max_n) {
  long long best = -1;
  std::vector<long long> counts(6, 0);
  std::function<void(int, long long)> rec = [&](int idx, long long left) {
    if (idx == 5) {
      counts[5] = left;
      const AnonymousProfile F{E.candidates, counts};
      const auto cls = membership(K, F);
      if (cls && *cls == r) {
        const long long d = tournament_distance(spec, E, F);
        if (best < 0 || d < best) best = d;
      }
      return;
    }
    for (long long v = 0; v <= left; ++v) {
      counts[static_cast<std::size_t>(idx)] = v;
      rec(idx + 1, left - v);
    }
  };
  for (long long n = 1; n <= max_n; ++n) rec(0, n);
  REQUIRE(best >= 0);
  return best;
}

}  // namespace

TEST_CASE("rule names are canonical") {
  CHECK(votewise_rule(ConsensusSpec::weak_unanimity(), GroundMetric::kendall(), PNorm::finite(1))
            .name() == "dr(wunam,kendall|p=1)");
  CHECK(RuleSpec{ConsensusSpec::condorcet(), TournamentSpec{true}}.name() == "dr(cond,rt)");
  CHECK(RuleSpec{ConsensusSpec::strong_unanimity(2), SimplexLp{PNorm::inf()}}.name() ==
        "dr(sunam:2,lp:p=inf)");
}

TEST_CASE("worked example: kendall votewise scores and winner") {
  const AnonymousProfile E = parse_profile_text("3: a>b>c\n2: b>a>c\n2: c>b>a\n");
  const RuleSpec R =
      votewise_rule(ConsensusSpec::weak_unanimity(), GroundMetric::kendall(), PNorm::finite(1));
  const RuleOutcome out = dr_outcome(R, E);
  CHECK(winner_names(E.candidates, out) == std::vector<std::string>{"b"});
  REQUIRE(out.scores.size() == 3);
  CHECK(out.scores[0].second.value() == 6);   // a
  CHECK(out.scores[1].second.value() == 5);   // b
  CHECK(out.scores[2].second.value() == 10);  // c
}

TEST_CASE("oracle rules on the worked example") {
  const AnonymousProfile E = parse_profile_text("3: a>b>c\n2: b>a>c\n2: c>b>a\n");
  auto winners = [&](OracleRule r) {
    OracleSpec o;
    o.rule = r;
    return winner_names(E.candidates, oracle_rule(o, E));
  };
  CHECK(winners(OracleRule::Borda) == std::vector<std::string>{"b"});
  CHECK(winners(OracleRule::Plurality) == std::vector<std::string>{"a"});
  CHECK(winners(OracleRule::Copeland) == std::vector<std::string>{"b"});
  // borda in minimization form: n(m-1) - points; b gathers 9 points from
  // weights (2,1,0), so its score is 14 - 9 = 5
  OracleSpec borda;
  borda.rule = OracleRule::Borda;
  const RuleOutcome out = oracle_rule(borda, E);
  CHECK(out.scores[1].second.value() == 5);
}

TEST_CASE("scoring-oracle validation") {
  const AnonymousProfile E = parse_profile_text("1: a>b>c\n");
  OracleSpec bad;
  bad.rule = OracleRule::Scoring;
  bad.weights = {Rat(1), Rat(2), Rat(0)};  // not nonincreasing
  CHECK_THROWS_AS(oracle_rule(bad, E), Error);
  bad.weights = {Rat(1), Rat(0)};  // wrong arity
  CHECK_THROWS_AS(oracle_rule(bad, E), Error);
  OracleSpec ka;
  ka.rule = OracleRule::KApproval;
  ka.k = 4;
  CHECK_THROWS_AS(oracle_rule(ka, E), Error);
  ka.k = 2;
  CHECK(winner_names(E.candidates, oracle_rule(ka, E)) ==
        std::vector<std::string>{"a", "b"});
}

TEST_CASE("k-approval with k = 1 is plurality; scoring with borda weights is borda") {
  std::mt19937_64 rng(derive_seed(3, 1));
  for (int i = 0; i < 20; ++i) {
    const AnonymousProfile E = sample_profile(3, 6, Culture::ImpartialCulture, rng);
    OracleSpec plu, ka, borda, sc;
    plu.rule = OracleRule::Plurality;
    ka.rule = OracleRule::KApproval;
    ka.k = 1;
    borda.rule = OracleRule::Borda;
    sc.rule = OracleRule::Scoring;
    sc.weights = {Rat(2), Rat(1), Rat(0)};
    CHECK(oracle_rule(plu, E).winners == oracle_rule(ka, E).winners);
    CHECK(oracle_rule(borda, E).winners == oracle_rule(sc, E).winners);
  }
}

TEST_CASE("identity checks run exhaustively and catch differences") {
  OracleSpec borda;
  borda.rule = OracleRule::Borda;
  const RuleSpec good =
      votewise_rule(ConsensusSpec::weak_unanimity(), GroundMetric::kendall(), PNorm::finite(1));
  const IdentityReport ok = check_identity(good, borda, 3, 3);
  CHECK(ok.equal);
  CHECK(ok.cases_checked == 6 + 21 + 56);

  // plurality is not borda: a mismatch profile must be reported
  const RuleSpec plu =
      votewise_rule(ConsensusSpec::weak_unanimity(), GroundMetric::discrete(), PNorm::finite(1));
  const IdentityReport bad = check_identity(plu, borda, 3, 4);
  CHECK(!bad.equal);
  CHECK(bad.mismatch.has_value());
  CHECK(!bad.detail.empty());
}

TEST_CASE("sampled identity checks are deterministic") {
  OracleSpec borda;
  borda.rule = OracleRule::Borda;
  const RuleSpec R =
      votewise_rule(ConsensusSpec::weak_unanimity(), GroundMetric::kendall(), PNorm::finite(1));
  const IdentityReport a = check_identity_sampled(R, borda, 3, 30, 25, 11);
  const IdentityReport b = check_identity_sampled(R, borda, 3, 30, 25, 11);
  CHECK(a.equal);
  CHECK(b.equal);
  CHECK(a.cases_checked == 25);
}

TEST_CASE("profile enumeration counts compositions") {
  long long count = 0;
  for_each_anonymous_profile(3, 2, [&](const AnonymousProfile&) { ++count; });
  CHECK(count == 21);
  count = 0;
  for_each_anonymous_profile(3, 6, [&](const AnonymousProfile&) { ++count; });
  CHECK(count == 462);
}

TEST_CASE("simplex corner rule matches brute-force corner minimization") {
  std::mt19937_64 rng(derive_seed(21, 4));
  const CandidateSet C = CandidateSet::alphabet(3);
  const auto& all = enumerate_rankings(3);
  for (int i = 0; i < 60; ++i) {
    const long long den = 1 + static_cast<long long>(uniform_below(rng, 12));
    const SimplexPoint x =
        vote_distribution(sample_profile(3, den, Culture::UniformComposition, rng));
    for (const PNorm p : {PNorm::finite(1), PNorm::finite(2), PNorm::inf()}) {
      for (int s : {1, 3}) {
        const RuleOutcome got = simplex_lp_rule(s, p, x);
        // independent: corner distance per class, then argmin
        std::map<SRanking, Rat> score;
        for (std::size_t t = 0; t < 6; ++t) {
          Rat d;
          if (p.is_inf()) {
            d = Rat(1) - x.coords[t];
            for (std::size_t u = 0; u < 6; ++u)
              if (u != t && x.coords[u] > d) d = x.coords[u];
          } else {
            d = rat_pow(Rat(1) - x.coords[t], p.p());
            for (std::size_t u = 0; u < 6; ++u)
              if (u != t) d += rat_pow(x.coords[u], p.p());
          }
          const SRanking cls = SRanking::prefix_of(all[t], s);
          auto it = score.find(cls);
          if (it == score.end() || d < it->second) score[cls] = d;
        }
        Rat best = score.begin()->second;
        for (const auto& [cls, d] : score) best = std::min(best, d);
        std::vector<SRanking> want;
        for (const auto& [cls, d] : score)
          if (d == best) want.push_back(cls);
        std::sort(want.begin(), want.end());
        CHECK(got.winners == want);
      }
    }
  }
  (void)C;
}

TEST_CASE("barycenter ties every corner-rule outcome") {
  const SimplexPoint b =
      make_simplex_point(CandidateSet::alphabet(3), std::vector<Rat>(6, make_rat(1, 6)));
  CHECK(simplex_lp_rule(1, PNorm::finite(1), b).winners.size() == 3);
  CHECK(simplex_lp_rule(3, PNorm::finite(2), b).winners.size() == 6);
  CHECK(simplex_lp_rule(3, PNorm::inf(), b).winners.size() == 6);
}

TEST_CASE("simplex-lp rule via dr_outcome agrees with simplex_lp_rule") {
  std::mt19937_64 rng(derive_seed(21, 5));
  for (int i = 0; i < 20; ++i) {
    const SimplexPoint x =
        vote_distribution(sample_profile(3, 9, Culture::UniformComposition, rng));
    const RuleSpec R{ConsensusSpec::weak_unanimity(), SimplexLp{PNorm::finite(2)}};
    CHECK(dr_outcome(R, x).winners == simplex_lp_rule(1, PNorm::finite(2), x).winners);
  }
}

TEST_CASE("tournament rule scores match profile-enumeration brute force") {
  const std::vector<std::pair<ConsensusSpec, const char*>> kinds = {
      {ConsensusSpec::condorcet(), "cond"},
      {ConsensusSpec::weak_unanimity(), "wunam"},
      {ConsensusSpec::strong_unanimity(3), "sunam"}};
  for (const auto& [K, label] : kinds) {
    CAPTURE(label);
    for (long long n : {1LL, 2LL, 3LL}) {
      for_each_anonymous_profile(3, n, [&, Kp = &K](const AnonymousProfile& E) {
        for (bool reduced : {false, true}) {
          const RuleSpec R{*Kp, TournamentSpec{reduced}};
          const RuleOutcome out = dr_outcome(R, E);
          for (const auto& [r, score] : out.scores) {
            REQUIRE(score.is_finite());
            // margins of E stay within n, so minima are reached by n' <= n+2;
            // scanning to 6 leaves headroom
            const long long want =
                tournament_class_bruteforce(*Kp, TournamentSpec{reduced}, E, r, 6);
            REQUIRE(score.value() == rat_of(want));
          }
        }
      });
    }
  }
}

TEST_CASE("copeland equals the reduced-tournament condorcet rule on samples") {
  OracleSpec cop;
  cop.rule = OracleRule::Copeland;
  const RuleSpec R{ConsensusSpec::condorcet(), TournamentSpec{true}};
  const IdentityReport rep = check_identity_sampled(R, cop, 4, 9, 40, 17);
  CHECK(rep.equal);
}

TEST_CASE("votewise rules reject raw simplex points") {
  const SimplexPoint x = make_simplex_point(CandidateSet::alphabet(3),
                                            {Rat(1), Rat(0), Rat(0), Rat(0), Rat(0), Rat(0)});
  const RuleSpec R =
      votewise_rule(ConsensusSpec::weak_unanimity(), GroundMetric::kendall(), PNorm::finite(1));
  CHECK_THROWS_AS(dr_outcome(R, x), Error);
}

TEST_CASE("kantorovich rules accept both profiles and points") {
  const AnonymousProfile E = parse_profile_text("3: a>b>c\n2: b>a>c\n2: c>b>a\n");
  const RuleSpec R{ConsensusSpec::weak_unanimity(), KantorovichSpec{GroundMetric::kendall(), 1}};
  const RuleOutcome viaE = dr_outcome(R, E);
  const RuleOutcome viaX = dr_outcome(R, vote_distribution(E));
  CHECK(viaE.winners == viaX.winners);
  CHECK(viaE.scores == viaX.scores);
  // singleton classes: the votewise score is n times the distribution score
  const RuleSpec K{ConsensusSpec::strong_unanimity(3),
                   KantorovichSpec{GroundMetric::kendall(), 1}};
  const RuleOutcome kx = dr_outcome(K, vote_distribution(E));
  const RuleSpec V =
      votewise_rule(ConsensusSpec::strong_unanimity(3), GroundMetric::kendall(), PNorm::finite(1));
  const RuleOutcome vw = dr_outcome(V, E);
  for (std::size_t i = 0; i < vw.scores.size(); ++i)
    CHECK(vw.scores[i].second.value() == Rat(7) * kx.scores[i].second.value());
}

TEST_CASE("profile sampling is deterministic and uniform-composition covers all counts") {
  std::mt19937_64 a(42), b(42);
  const AnonymousProfile e1 = sample_profile(3, 10, Culture::ImpartialCulture, a);
  const AnonymousProfile e2 = sample_profile(3, 10, Culture::ImpartialCulture, b);
  CHECK(e1.counts == e2.counts);

  // m = 2, n = 3: four compositions, each should appear under uniform counts
  std::mt19937_64 rng(7);
  std::set<std::vector<long long>> seen;
  for (int i = 0; i < 200; ++i)
    seen.insert(sample_profile(2, 3, Culture::UniformComposition, rng).counts);
  CHECK(seen.size() == 4);
}

TEST_CASE("impartial culture draws n ballots") {
  std::mt19937_64 rng(5);
  const AnonymousProfile E = sample_profile(4, 17, Culture::ImpartialCulture, rng);
  CHECK(E.n() == 17);
  CHECK(E.candidates.size() == 4);
}

TEST_CASE("boundary fraction is thread-count invariant") {
  const RuleSpec R{ConsensusSpec::condorcet(), TournamentSpec{true}};
  const BoundaryEstimate one = boundary_fraction(R, 3, 11, Culture::ImpartialCulture, 512, 9, 1);
  const BoundaryEstimate four = boundary_fraction(R, 3, 11, Culture::ImpartialCulture, 512, 9, 4);
  CHECK(one.ties == four.ties);
  CHECK(one.fraction == four.fraction);
  CHECK(one.trials == 512);
  // manual replay of the block scheme
  long long ties = 0;
  for (long long blk = 0; blk < 2; ++blk) {
    std::mt19937_64 rng(derive_seed(9, static_cast<std::uint64_t>(blk)));
    for (int i = 0; i < 256; ++i)
      if (boundary_membership(R, sample_profile(3, 11, Culture::ImpartialCulture, rng))) ++ties;
  }
  CHECK(ties == one.ties);
}

TEST_CASE("diagnostics pass for the structural consensuses") {
  DiagnosticsOptions opts;
  opts.samples = 40;
  opts.denominator_max = 12;
  const std::vector<DiagCheck> checks = {DiagCheck::Neutrality, DiagCheck::Homogeneity,
                                         DiagCheck::Convexity, DiagCheck::Consistency};
  for (const ConsensusSpec& K :
       {ConsensusSpec::weak_unanimity(), ConsensusSpec::strong_unanimity(3)}) {
    const DiagnosticsReport rep = consensus_diagnostics(K, checks, opts);
    for (const CheckResult& r : rep.results) {
      CAPTURE(diag_check_name(r.check));
      CAPTURE(r.detail);
      CHECK(r.pass);
    }
    // ballot faces with disjoint supports keep full total variation
    const DiagnosticsReport sep = consensus_diagnostics(K, {DiagCheck::Separation}, opts);
    CHECK(sep.results[0].pass);
  }
}

TEST_CASE("condorcet diagnostics: convex but not separated") {
  DiagnosticsOptions opts;
  opts.samples = 30;
  opts.denominator_max = 40;
  const ConsensusSpec K = ConsensusSpec::condorcet();
  const DiagnosticsReport conv = consensus_diagnostics(K, {DiagCheck::Convexity}, opts);
  CHECK(conv.results[0].pass);
  const DiagnosticsReport sep = consensus_diagnostics(K, {DiagCheck::Separation}, opts);
  CHECK(!sep.results[0].pass);
  REQUIRE(!sep.results[0].separation_schedule.empty());
  // running minimum is nonincreasing and ends under the threshold
  const auto& sched = sep.results[0].separation_schedule;
  for (std::size_t i = 1; i < sched.size(); ++i) CHECK(sched[i].second <= sched[i - 1].second);
  CHECK(sched.back().second < make_rat(1, 20));
}

TEST_CASE("a non-neutral consensus is caught with a witness") {
  const CandidateSet C = CandidateSet::alphabet(3);
  std::map<SRanking, std::vector<Ranking>> classes;
  classes[SRanking::of_candidate(0)] = {parse_ranking(C, "a>b>c")};
  classes[SRanking::of_candidate(1)] = {parse_ranking(C, "b>a>c")};
  const ConsensusSpec K = ConsensusSpec::generalized_unanimity(C, classes);
  DiagnosticsOptions opts;
  opts.samples = 30;
  const DiagnosticsReport rep = consensus_diagnostics(K, {DiagCheck::Neutrality}, opts);
  CHECK(!rep.results[0].pass);
  CHECK(!rep.results[0].detail.empty());
}

TEST_CASE("the nonconvex example consensus fails convexity with the expected midpoint") {
  DiagnosticsOptions opts;
  const DiagnosticsReport rep =
      consensus_diagnostics(nonconvex_example_consensus(), {DiagCheck::Convexity}, opts);
  REQUIRE(!rep.results[0].pass);
  REQUIRE(rep.results[0].witness_points.size() == 3);
  const SimplexPoint& mid = rep.results[0].witness_points[2];
  const std::vector<Rat> want = {make_rat(1, 2), Rat(0), Rat(0), make_rat(1, 4), Rat(0),
                                 make_rat(1, 4)};
  CHECK(mid.coords == want);
}

TEST_CASE("fixed-candidate consensuses diagnose over their own alphabet") {
  const CandidateSet C = CandidateSet::alphabet(3);
  std::map<SRanking, std::vector<Ranking>> classes;
  classes[SRanking::of_candidate(0)] = {parse_ranking(C, "a>b>c")};
  const ConsensusSpec K = ConsensusSpec::generalized_unanimity(C, classes);
  DiagnosticsOptions opts;
  opts.samples = 5;
  // fixed candidate sets override opts.m
  const DiagnosticsReport rep = consensus_diagnostics(K, {DiagCheck::Homogeneity}, opts);
  CHECK(rep.results[0].pass);
}
