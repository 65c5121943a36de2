#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "drvote/elections.hpp"
#include "drvote/metrics.hpp"

namespace drvote {

// Simplex segment with selectable endpoints. A zero-length segment with at
// least one closed end is a point; with both ends open it is empty (error).
struct Segment {
  SimplexPoint a;
  SimplexPoint b;
  bool a_closed = true;
  bool b_closed = true;
};

enum class ConsensusKind {
  StrongUnanimity,       // all ballots share the top-s prefix r
  WeakUnanimity,         // = StrongUnanimity with s = 1
  Condorcet,             // a Condorcet winner exists; class label = that candidate
  GeneralizedUnanimity,  // explicit ballot sets S_r, pairwise disjoint
  PointSets,             // class r = a finite set of simplex points
  SegmentSets,           // class r = a finite union of segments (and points)
};

// Immutable consensus description. Copies share state, including the internal
// delta-table memo.
class ConsensusSpec {
 public:
  static ConsensusSpec strong_unanimity(int s);
  static ConsensusSpec weak_unanimity();
  static ConsensusSpec condorcet();
  static ConsensusSpec generalized_unanimity(CandidateSet C,
                                             std::map<SRanking, std::vector<Ranking>> classes);
  static ConsensusSpec point_sets(CandidateSet C, std::map<SRanking, std::vector<SimplexPoint>>);
  static ConsensusSpec segment_sets(CandidateSet C, std::map<SRanking, std::vector<Segment>>);

  ConsensusKind kind() const;
  // Outcome arity for m candidates.
  int s(int m) const;
  // Kinds whose classes are "all ballots lie in S_r" for a ballot set S_r.
  bool has_ballot_classes() const;
  // Kinds whose classes are explicit simplex subsets.
  bool is_simplex_sets() const { return kind() == ConsensusKind::PointSets || kind() == ConsensusKind::SegmentSets; }

  // Candidate set for file-defined kinds; nullopt for the structural kinds,
  // which work over any candidate set.
  std::optional<CandidateSet> fixed_candidates() const;

  // Class labels in canonical order. For file-defined kinds the candidate set
  // must match the one this consensus was built with.
  std::vector<SRanking> outcomes(const CandidateSet& C) const;
  // S_r for ballot-class kinds; Domain error otherwise or for unknown r.
  std::vector<Ranking> ballot_class(const CandidateSet& C, const SRanking& r) const;

  const std::vector<SimplexPoint>& points_of(const SRanking& r) const;
  const std::vector<Segment>& segments_of(const SRanking& r) const;

  std::string key() const;  // stable identity string

  // internal: delta-table memo access
  struct Impl;
  const std::shared_ptr<const Impl>& impl() const { return impl_; }

 private:
  explicit ConsensusSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Class containing E, if any. Ballot-class kinds and Condorcet accept
// profiles; simplex-set kinds accept points (profiles go through their
// distribution). Disjointness of generalized-unanimity classes makes the
// answer unique by construction.
std::optional<SRanking> membership(const ConsensusSpec& K, const AnonymousProfile& E);
std::optional<SRanking> membership(const ConsensusSpec& K, const SimplexPoint& x);

// Nearest element of S_r to t under g; ties broken by canonical ranking
// order. Ballot-class kinds only.
Ranking vmp_minimizer(const ConsensusSpec& K, const CandidateSet& C, const GroundMetric& g,
                      const Ranking& t, const SRanking& r);

// delta(t, r) = g(t, vmp_minimizer(t, r)) for every t, in lexicographic
// ranking order. Memoized per (K, g, r); population is atomic w.r.t. readers.
std::shared_ptr<const std::vector<Rat>> delta_table(const ConsensusSpec& K, const CandidateSet& C,
                                                    const GroundMetric& g, const SRanking& r);

// Search bounds for the Condorcet brute force.
struct CondorcetSearchBounds {
  int max_m = 4;
  long long max_n = 12;
};

// Distance from E to class K_r under a votewise distance, in the p-th power
// convention (normalized: divided by n^p, or n when p = inf). Ballot-class
// kinds use the per-ballot minimizer sum; Condorcet enumerates ballot changes
// of increasing size with an exact lower-bound cutoff. Empty classes give the
// +infinity sentinel.
ExtRat distance_to_consensus(const ConsensusSpec& K, const VotewiseSpec& spec,
                             const AnonymousProfile& E, const SRanking& r,
                             const CondorcetSearchBounds& bounds = {});

// All s-rankings over m candidates, lexicographic.
std::vector<SRanking> enumerate_srankings(int m, int s);

// GeneralizedUnanimity spec file:
//   {"candidates": ["a","b","c"],
//    "classes": {"a": ["a>b>c", "a>c>b"], "b": ["b>a>c"], ...}}
// Keys are s-rankings in ">" notation, values full rankings. Classes must be
// nonempty and pairwise disjoint.
ConsensusSpec parse_generalized_unanimity_json(const std::string& json_text);

}  // namespace drvote
