#include "drvote/metrics.hpp"

#include <algorithm>

namespace drvote {

ExtRat votewise_distance(const VotewiseSpec& spec, const Profile& a, const Profile& b) {
  if (!(a.candidates == b.candidates))
    fail_domain("votewise distance between different candidate sets");
  if (a.n() != b.n()) return ExtRat::infinity();
  const int n = a.n();
  if (n == 0) fail_domain("votewise distance between empty profiles");
  if (spec.p.is_inf()) {
    Rat worst = 0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, ground_distance(spec.ground, a.ballots[i], b.ballots[i]));
    if (spec.normalized) worst /= n;
    return ExtRat(worst);
  }
  const unsigned p = spec.p.p();
  Rat sum = 0;
  for (int i = 0; i < n; ++i)
    sum += rat_pow(ground_distance(spec.ground, a.ballots[i], b.ballots[i]), p);
  if (spec.normalized) sum /= rat_pow(Rat(n), p);
  return ExtRat(sum);
}

long long tournament_matrix_distance(const TournamentSpec& spec, const TournamentMatrix& A,
                                     const TournamentMatrix& B) {
  if (!(A.candidates == B.candidates))
    fail_domain("tournament distance between different candidate sets");
  long long total = 0;
  if (spec.reduced) {
    const auto sa = reduced_tournament(A), sb = reduced_tournament(B);
    for (std::size_t k = 0; k < sa.size(); ++k) total += std::abs(sa[k] - sb[k]);
  } else {
    for (std::size_t k = 0; k < A.entries.size(); ++k)
      total += std::abs(A.entries[k] - B.entries[k]);
  }
  return total;
}

long long tournament_distance(const TournamentSpec& spec, const AnonymousProfile& a,
                              const AnonymousProfile& b) {
  return tournament_matrix_distance(spec, tournament_matrix(a), tournament_matrix(b));
}

}  // namespace drvote
