#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drvote/rankings.hpp"
#include "drvote/rational.hpp"

namespace drvote {

// A profile lists one ballot per voter, in voter order.
struct Profile {
  CandidateSet candidates;
  std::vector<Ranking> ballots;

  int n() const { return static_cast<int>(ballots.size()); }
};

// Counts per ranking, indexed by the lexicographic ranking order; length m!.
struct AnonymousProfile {
  CandidateSet candidates;
  std::vector<long long> counts;

  long long n() const;
};

// Point of the vote simplex: nonnegative rational coordinates summing to 1,
// one per ranking in lexicographic order.
struct SimplexPoint {
  CandidateSet candidates;
  std::vector<Rat> coords;
};

AnonymousProfile make_anonymous_profile(CandidateSet C, std::vector<long long> counts);
SimplexPoint make_simplex_point(CandidateSet C, std::vector<Rat> coords);

AnonymousProfile vote_number_map(const Profile& E);
SimplexPoint vote_distribution(const Profile& E);
SimplexPoint vote_distribution(const AnonymousProfile& E);

// Inverse of vote_distribution at voter count n; Domain error unless every
// n * coord is an integer.
AnonymousProfile realize(const SimplexPoint& x, long long n);

// Ballots listed in lexicographic ranking order.
Profile to_profile(const AnonymousProfile& E);

// Antisymmetric margin matrix: entry(a, b) = #(a above b) - #(b above a).
struct TournamentMatrix {
  CandidateSet candidates;
  std::vector<long long> entries;  // row-major m*m

  long long at(int i, int j) const {
    return entries.at(static_cast<std::size_t>(i) * candidates.size() + j);
  }
};

TournamentMatrix tournament_matrix(const AnonymousProfile& E);
TournamentMatrix tournament_matrix(const Profile& E);

// Entrywise signs of the margins, in {-1, 0, +1}.
std::vector<int> reduced_tournament(const TournamentMatrix& T);

// Candidate ranked above every other by strictly more than half the voters.
std::optional<int> condorcet_winner(const AnonymousProfile& E);

// Rational pairwise fractions for simplex points: frac(a, b) = total weight of
// rankings placing a above b. Condorcet winner iff frac(c, b) > 1/2 for all b.
Rat pairwise_fraction(const SimplexPoint& x, int a, int b);
std::optional<int> condorcet_winner(const SimplexPoint& x);

// --- file formats ---
//
// Profile text: one "<count>: <ranking>" line per ballot group, e.g.
//   # any comment
//   3: a>b>c
//   2: b>a>c
// The candidate set is the set of names mentioned, sorted by name.
AnonymousProfile parse_profile_text(const std::string& text);
std::string format_profile_text(const AnonymousProfile& E);

// Simplex point JSON:
//   {"candidates": ["a","b","c"], "order": "lex", "coords": ["3/7","0",...]}
// "order" is optional and must be "lex" when present. Rationals are strings.
SimplexPoint parse_point_json(const std::string& json_text);
std::string format_point_json(const SimplexPoint& x);

}  // namespace drvote
