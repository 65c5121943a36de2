#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drvote/rational.hpp"

namespace drvote {

// Enumeration over all m! rankings is gated at this many candidates.
inline constexpr int kMaxEnumerationCandidates = 8;

class CandidateSet {
 public:
  CandidateSet() = default;  // empty; fill via assignment
  explicit CandidateSet(std::vector<std::string> names);
  // Candidates "a", "b", ... ; m <= 26.
  static CandidateSet alphabet(int m);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  int index_of(const std::string& name) const;  // Domain error if absent
  std::optional<int> find(const std::string& name) const;
  bool operator==(const CandidateSet&) const = default;

 private:
  std::vector<std::string> names_;
};

// Strict total order over all m candidates, stored top-first as indices.
class Ranking {
 public:
  Ranking() = default;
  explicit Ranking(std::vector<int> order);  // validates a permutation of 0..m-1

  int size() const { return static_cast<int>(order_.size()); }
  int at(int position) const { return order_.at(position); }  // 0-based position
  int rank_of(int candidate) const;                           // 1-based
  const std::vector<int>& order() const { return order_; }

  bool operator==(const Ranking&) const = default;
  auto operator<=>(const Ranking&) const = default;

 private:
  std::vector<int> order_;
};

// Top-s prefix of a ranking: s distinct candidates, top first, 1 <= s <= m.
class SRanking {
 public:
  SRanking() = default;
  explicit SRanking(std::vector<int> prefix);
  static SRanking of_candidate(int c) { return SRanking({c}); }
  static SRanking prefix_of(const Ranking& r, int s);

  int size() const { return static_cast<int>(prefix_.size()); }
  int at(int position) const { return prefix_.at(position); }
  const std::vector<int>& prefix() const { return prefix_; }

  bool operator==(const SRanking&) const = default;
  auto operator<=>(const SRanking&) const = default;

 private:
  std::vector<int> prefix_;
};

// All m! rankings in lexicographic order of their top-first index sequences;
// this order fixes the meaning of every length-m! vector in the library.
const std::vector<Ranking>& enumerate_rankings(int m);
long long factorial(int m);
long long ranking_index(const Ranking& r);             // position in the lex order
const Ranking& ranking_from_index(int m, long long i);

int rank_of(const Ranking& r, int candidate);  // 1-based

// Text forms relative to a candidate set: "a>b>c".
Ranking parse_ranking(const CandidateSet& C, const std::string& text);
SRanking parse_sranking(const CandidateSet& C, const std::string& text);
std::string format_ranking(const CandidateSet& C, const Ranking& r);
std::string format_sranking(const CandidateSet& C, const SRanking& r);

enum class GroundKind {
  Discrete,          // 0 iff equal, else 1
  Kendall,           // number of discordant pairs = adjacent-swap distance
  Footrule,          // sum of rank displacements
  WeightedFootrule,  // sum_c |w_rk(rho,c) - w_rk(sigma,c)|
  WeightedKendall,   // cheapest adjacent-swap path, swap at slot i costs |w_i - w_{i+1}|
};

// Weighted kinds carry one weight per rank, nonincreasing with w_1 > w_m.
// WeightedFootrule with repeated weights is a pseudometric, which is allowed.
// WeightedKendall resolves an underdetermined definition in the source
// material as the cheapest adjacent-transposition path; it is exact but
// considered experimental, and is gated at m <= 5 by the path search.
struct GroundMetric {
  GroundKind kind = GroundKind::Kendall;
  std::vector<Rat> weights;

  static GroundMetric discrete() { return {GroundKind::Discrete, {}}; }
  static GroundMetric kendall() { return {GroundKind::Kendall, {}}; }
  static GroundMetric footrule() { return {GroundKind::Footrule, {}}; }
  static GroundMetric weighted_footrule(std::vector<Rat> w);
  static GroundMetric weighted_kendall(std::vector<Rat> w);
  static GroundMetric borda_footrule(int m);  // weights m-1, m-2, ..., 0

  // Stable identity string, usable as a cache key.
  std::string key() const;
};

Rat ground_distance(const GroundMetric& g, const Ranking& a, const Ranking& b);

// max over pairs; all supported grounds are invariant under candidate
// relabeling, so this is max_t ground_distance(identity, t).
Rat max_ground_distance(const GroundMetric& g, int m);

// Smallest nonzero pairwise distance; Domain error if distinct rankings at
// distance 0 exist (pseudometric), since callers use it as a progress bound.
Rat min_positive_ground_distance(const GroundMetric& g, int m);

}  // namespace drvote
