#pragma once

#include "drvote/elections.hpp"
#include "drvote/rankings.hpp"

namespace drvote {

// Norm exponent: a finite integer p >= 1, or infinity. Non-integer exponents
// are rejected because the p-th powers would leave exact arithmetic.
class PNorm {
 public:
  static PNorm finite(unsigned p) {
    if (p < 1) fail_domain("norm exponent must satisfy p >= 1");
    return PNorm(false, p);
  }
  static PNorm inf() { return PNorm(true, 0); }

  bool is_inf() const { return infinite_; }
  unsigned p() const {
    if (infinite_) fail_domain("finite exponent requested from p = inf");
    return p_;
  }
  std::string str() const { return infinite_ ? "inf" : std::to_string(p_); }
  bool operator==(const PNorm&) const = default;

 private:
  PNorm(bool inf, unsigned p) : infinite_(inf), p_(p) {}
  bool infinite_;
  unsigned p_;
};

struct VotewiseSpec {
  GroundMetric ground;
  PNorm p = PNorm::finite(1);
  bool normalized = false;  // divide by n^p (finite p) or n (p = inf)

  std::string key() const {
    return ground.key() + "|p=" + p.str() + (normalized ? "|norm" : "");
  }
};

// Voter-aligned distance between equal-size profiles over the same candidates.
// Finite p returns the p-th POWER sum_i g(pi_i, sigma_i)^p so that values stay
// rational; p = inf returns max_i g. Profiles of different sizes are
// incomparable: the +infinity sentinel, not a number.
ExtRat votewise_distance(const VotewiseSpec& spec, const Profile& a, const Profile& b);

struct TournamentSpec {
  bool reduced = false;  // compare entrywise signs instead of margins
};

// Entrywise l1 distance between (reduced) tournament matrices. Defined for
// any pair of elections, including different voter counts.
long long tournament_distance(const TournamentSpec& spec, const AnonymousProfile& a,
                              const AnonymousProfile& b);
long long tournament_matrix_distance(const TournamentSpec& spec, const TournamentMatrix& A,
                                     const TournamentMatrix& B);

}  // namespace drvote
