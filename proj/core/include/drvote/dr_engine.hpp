#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <variant>

#include "drvote/consensus.hpp"
#include "drvote/transport.hpp"

namespace drvote {

// Distance measured directly on the simplex. For ballot-class consensuses the
// class is read as its unanimous corners {e_t : t in S_r}, which is what makes
// the closed-form corner rule below exact; segment/point classes are measured
// as the given sets (segments require p = 2, reported as squared distance).
struct SimplexLp {
  PNorm p = PNorm::finite(1);
};

// Wasserstein distance on the simplex with ground costs d^p; evaluates
// profiles through their vote distribution, which agrees with the quotient
// of the votewise distance at equal voter counts.
struct KantorovichSpec {
  GroundMetric ground;
  unsigned p = 1;
};

using RuleDistance = std::variant<VotewiseSpec, TournamentSpec, SimplexLp, KantorovichSpec>;

struct RuleSpec {
  ConsensusSpec consensus;
  RuleDistance distance;

  std::string name() const;
};

// Scores use the p-th power convention of the underlying distance; winners
// are every argmin, in canonical outcome order.
struct RuleOutcome {
  std::vector<SRanking> winners;
  std::vector<std::pair<SRanking, ExtRat>> scores;
};

RuleOutcome dr_outcome(const RuleSpec& R, const AnonymousProfile& E);
RuleOutcome dr_outcome(const RuleSpec& R, const SimplexPoint& x);

// Corner rule: winners are the top-s prefixes of the maximal-coordinate
// rankings. Computed by the closed form and cross-checked internally against
// direct distance minimization over the corners.
RuleOutcome simplex_lp_rule(int s, PNorm p, const SimplexPoint& x);

enum class OracleRule { Borda, Plurality, KApproval, Scoring, Kemeny, Copeland, ModalRanking };

struct OracleSpec {
  OracleRule rule;
  int k = 0;                 // KApproval
  std::vector<Rat> weights;  // Scoring
  std::string name() const;
};

// Textbook implementations in minimization form (winners = argmin scores).
// Copeland awards win 2, tie 1, loss 0, i.e. the half-point-per-tie scale.
RuleOutcome oracle_rule(const OracleSpec& oracle, const AnonymousProfile& E);

struct IdentityReport {
  bool equal = true;
  long long cases_checked = 0;
  std::optional<AnonymousProfile> mismatch;
  std::string detail;
};

// Exhaustive winner-set comparison over every anonymous profile with
// n_min <= n <= n_max.
IdentityReport check_identity(const RuleSpec& lhs, const OracleSpec& rhs, int m,
                              long long n_max, long long n_min = 1);
IdentityReport check_identity_sampled(const RuleSpec& lhs, const OracleSpec& rhs, int m,
                                      long long n, int samples, std::uint64_t seed);

bool boundary_membership(const RuleSpec& R, const AnonymousProfile& E);

enum class Culture {
  ImpartialCulture,    // each voter draws a uniform ranking
  UniformComposition,  // counts uniform over all compositions of n
};

AnonymousProfile sample_profile(int m, long long n, Culture culture, std::mt19937_64& rng);

struct BoundaryEstimate {
  long long trials = 0;
  long long ties = 0;
  Rat fraction;        // exact ties/trials
  double conf_radius;  // ~95% normal-approximation half-width
};

// Monte Carlo tie-region mass. Work is cut into fixed-size blocks with seeds
// derived per block, so the estimate is identical for any thread count.
BoundaryEstimate boundary_fraction(const RuleSpec& R, int m, long long n, Culture culture,
                                   long long trials, std::uint64_t seed, int threads = 1);

enum class DiagCheck { Neutrality, Homogeneity, Convexity, Separation, Consistency };

struct DiagnosticsOptions {
  int m = 3;
  std::uint64_t seed = 1;
  int samples = 200;           // per check
  long long n_max = 12;        // voter counts for profile-based checks
  int denominator_max = 40;    // separation sampling schedule cap
  Rat separation_threshold = make_rat(1, 20);
};

struct CheckResult {
  DiagCheck check;
  bool pass = true;
  std::string detail;  // witness or summary
  std::vector<SimplexPoint> witness_points;  // e.g. {x, y, midpoint} for convexity
  std::vector<std::pair<long long, Rat>> separation_schedule;  // Separation only
};

struct DiagnosticsReport {
  std::vector<CheckResult> results;
  bool all_pass() const;
};

// Property probes for a consensus. Failures carry explicit witnesses;
// separation reports the running minimum distance between distinct classes as
// sample denominators grow (an upper bound for the true infimum), and fails
// once it drops below the threshold.
DiagnosticsReport consensus_diagnostics(const ConsensusSpec& K,
                                        const std::vector<DiagCheck>& checks,
                                        const DiagnosticsOptions& opts);

std::string diag_check_name(DiagCheck c);

// Every anonymous profile with m candidates and exactly n voters, counts in
// lexicographic composition order.
void for_each_anonymous_profile(int m, long long n,
                                const std::function<void(const AnonymousProfile&)>& fn);

// The two deliberately nonconvex m=3 consensuses used in documentation and
// tests: each class is the face where the candidate tops every ballot plus
// one extra midpoint where that candidate is ranked last by everyone.
ConsensusSpec nonconvex_example_consensus();

}  // namespace drvote
