#include "drvote/consensus.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

namespace drvote {

struct ConsensusSpec::Impl {
  ConsensusKind kind;
  int s = 1;  // StrongUnanimity arity; other kinds derive it
  std::optional<CandidateSet> fixed;
  std::map<SRanking, std::vector<Ranking>> classes;
  std::map<SRanking, std::vector<SimplexPoint>> points;
  std::map<SRanking, std::vector<Segment>> segments;
  std::string key;

  mutable std::mutex memo_mu;
  mutable std::map<std::pair<std::string, SRanking>, std::shared_ptr<const std::vector<Rat>>> memo;
};

namespace {

using Impl = ConsensusSpec::Impl;

std::shared_ptr<Impl> new_impl(ConsensusKind kind) {
  auto impl = std::make_shared<Impl>();
  impl->kind = kind;
  return impl;
}

void require_same_candidates(const Impl& impl, const CandidateSet& C) {
  if (impl.fixed && !(*impl.fixed == C))
    fail_domain("consensus was defined over a different candidate set");
}

int derived_s(const Impl& impl, int m) {
  switch (impl.kind) {
    case ConsensusKind::StrongUnanimity:
      if (impl.s > m) fail_domain("consensus arity s exceeds candidate count");
      return impl.s;
    case ConsensusKind::WeakUnanimity:
    case ConsensusKind::Condorcet:
      return 1;
    case ConsensusKind::GeneralizedUnanimity:
      return impl.classes.begin()->first.size();
    case ConsensusKind::PointSets:
      return impl.points.begin()->first.size();
    case ConsensusKind::SegmentSets:
      return impl.segments.begin()->first.size();
  }
  fail_internal("unreachable consensus kind");
}

void check_sranking_for(const CandidateSet& C, const SRanking& r) {
  for (int i = 0; i < r.size(); ++i)
    if (r.at(i) >= C.size()) fail_domain("s-ranking mentions an unknown candidate index");
}

}  // namespace

ConsensusSpec ConsensusSpec::strong_unanimity(int s) {
  if (s < 1) fail_domain("strong unanimity needs s >= 1");
  auto impl = new_impl(ConsensusKind::StrongUnanimity);
  impl->s = s;
  impl->key = "sunam:" + std::to_string(s);
  return ConsensusSpec(std::move(impl));
}

ConsensusSpec ConsensusSpec::weak_unanimity() {
  auto impl = new_impl(ConsensusKind::WeakUnanimity);
  impl->s = 1;
  impl->key = "wunam";
  return ConsensusSpec(std::move(impl));
}

ConsensusSpec ConsensusSpec::condorcet() {
  auto impl = new_impl(ConsensusKind::Condorcet);
  impl->s = 1;
  impl->key = "cond";
  return ConsensusSpec(std::move(impl));
}

ConsensusSpec ConsensusSpec::generalized_unanimity(
    CandidateSet C, std::map<SRanking, std::vector<Ranking>> classes) {
  if (classes.empty()) fail_domain("generalized unanimity needs at least one class");
  auto impl = new_impl(ConsensusKind::GeneralizedUnanimity);
  const int m = C.size();
  const int s = classes.begin()->first.size();
  std::set<Ranking> seen;
  for (auto& [r, ballots] : classes) {
    check_sranking_for(C, r);
    if (r.size() != s) fail_domain("generalized unanimity class labels must share one arity");
    if (ballots.empty()) fail_domain("generalized unanimity class with no ballots");
    std::sort(ballots.begin(), ballots.end());
    ballots.erase(std::unique(ballots.begin(), ballots.end()), ballots.end());
    for (const Ranking& b : ballots) {
      if (b.size() != m) fail_domain("class ballot does not match the candidate set");
      if (!seen.insert(b).second)
        fail_domain("generalized unanimity classes must be pairwise disjoint; ranking '" +
                    format_ranking(C, b) + "' appears twice");
    }
  }
  impl->s = s;
  impl->fixed = std::move(C);
  impl->classes = std::move(classes);
  impl->key = "genunam:m=" + std::to_string(m) + ":k=" + std::to_string(impl->classes.size());
  return ConsensusSpec(std::move(impl));
}

ConsensusSpec ConsensusSpec::point_sets(CandidateSet C,
                                        std::map<SRanking, std::vector<SimplexPoint>> points) {
  if (points.empty()) fail_domain("point-set consensus needs at least one class");
  auto impl = new_impl(ConsensusKind::PointSets);
  const int s = points.begin()->first.size();
  std::vector<std::vector<Rat>> seen;
  for (const auto& [r, pts] : points) {
    check_sranking_for(C, r);
    if (r.size() != s) fail_domain("point-set class labels must share one arity");
    if (pts.empty()) fail_domain("point-set class with no points");
    for (const SimplexPoint& p : pts) {
      if (!(p.candidates == C)) fail_domain("class point over a different candidate set");
      if (std::find(seen.begin(), seen.end(), p.coords) != seen.end())
        fail_domain("the same point appears in two consensus classes");
      seen.push_back(p.coords);
    }
  }
  impl->s = s;
  impl->fixed = std::move(C);
  impl->points = std::move(points);
  impl->key = "pointsets:k=" + std::to_string(impl->points.size());
  return ConsensusSpec(std::move(impl));
}

ConsensusSpec ConsensusSpec::segment_sets(CandidateSet C,
                                          std::map<SRanking, std::vector<Segment>> segments) {
  if (segments.empty()) fail_domain("segment-set consensus needs at least one class");
  auto impl = new_impl(ConsensusKind::SegmentSets);
  const int s = segments.begin()->first.size();
  for (const auto& [r, segs] : segments) {
    check_sranking_for(C, r);
    if (r.size() != s) fail_domain("segment-set class labels must share one arity");
    if (segs.empty()) fail_domain("segment-set class with no segments");
    for (const Segment& seg : segs) {
      if (!(seg.a.candidates == C) || !(seg.b.candidates == C))
        fail_domain("class segment over a different candidate set");
      if (seg.a.coords == seg.b.coords && !seg.a_closed && !seg.b_closed)
        fail_domain("zero-length segment with its only point excluded is empty");
    }
  }
  impl->s = s;
  impl->fixed = std::move(C);
  impl->segments = std::move(segments);
  impl->key = "segmentsets:k=" + std::to_string(impl->segments.size());
  return ConsensusSpec(std::move(impl));
}

ConsensusKind ConsensusSpec::kind() const { return impl_->kind; }

int ConsensusSpec::s(int m) const { return derived_s(*impl_, m); }

bool ConsensusSpec::has_ballot_classes() const {
  switch (impl_->kind) {
    case ConsensusKind::StrongUnanimity:
    case ConsensusKind::WeakUnanimity:
    case ConsensusKind::GeneralizedUnanimity:
      return true;
    default:
      return false;
  }
}

std::vector<SRanking> enumerate_srankings(int m, int s) {
  if (s < 1 || s > m) fail_domain("s-ranking arity out of range");
  std::vector<SRanking> out;
  std::vector<int> cur;
  std::vector<bool> used(m, false);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == s) {
      out.push_back(SRanking(cur));
      return;
    }
    for (int c = 0; c < m; ++c) {
      if (used[c]) continue;
      used[c] = true;
      cur.push_back(c);
      self(self);
      cur.pop_back();
      used[c] = false;
    }
  };
  rec(rec);
  return out;
}

std::vector<SRanking> ConsensusSpec::outcomes(const CandidateSet& C) const {
  require_same_candidates(*impl_, C);
  const int m = C.size();
  switch (impl_->kind) {
    case ConsensusKind::StrongUnanimity:
      return enumerate_srankings(m, derived_s(*impl_, m));
    case ConsensusKind::WeakUnanimity:
    case ConsensusKind::Condorcet:
      return enumerate_srankings(m, 1);
    case ConsensusKind::GeneralizedUnanimity: {
      std::vector<SRanking> out;
      for (const auto& [r, _] : impl_->classes) out.push_back(r);
      return out;
    }
    case ConsensusKind::PointSets: {
      std::vector<SRanking> out;
      for (const auto& [r, _] : impl_->points) out.push_back(r);
      return out;
    }
    case ConsensusKind::SegmentSets: {
      std::vector<SRanking> out;
      for (const auto& [r, _] : impl_->segments) out.push_back(r);
      return out;
    }
  }
  fail_internal("unreachable consensus kind");
}

namespace {

bool has_prefix(const Ranking& t, const SRanking& r) {
  for (int i = 0; i < r.size(); ++i)
    if (t.at(i) != r.at(i)) return false;
  return true;
}

}  // namespace

std::vector<Ranking> ConsensusSpec::ballot_class(const CandidateSet& C, const SRanking& r) const {
  require_same_candidates(*impl_, C);
  const int m = C.size();
  check_sranking_for(C, r);
  switch (impl_->kind) {
    case ConsensusKind::StrongUnanimity:
    case ConsensusKind::WeakUnanimity: {
      if (r.size() != derived_s(*impl_, m)) fail_domain("class label has the wrong arity");
      std::vector<Ranking> out;
      for (const Ranking& t : enumerate_rankings(m))
        if (has_prefix(t, r)) out.push_back(t);
      return out;
    }
    case ConsensusKind::GeneralizedUnanimity: {
      auto it = impl_->classes.find(r);
      if (it == impl_->classes.end()) fail_domain("no class with this label");
      return it->second;
    }
    default:
      fail_domain("consensus kind has no ballot classes");
  }
}

const std::vector<SimplexPoint>& ConsensusSpec::points_of(const SRanking& r) const {
  if (impl_->kind != ConsensusKind::PointSets) fail_domain("not a point-set consensus");
  auto it = impl_->points.find(r);
  if (it == impl_->points.end()) fail_domain("no class with this label");
  return it->second;
}

const std::vector<Segment>& ConsensusSpec::segments_of(const SRanking& r) const {
  if (impl_->kind != ConsensusKind::SegmentSets) fail_domain("not a segment-set consensus");
  auto it = impl_->segments.find(r);
  if (it == impl_->segments.end()) fail_domain("no class with this label");
  return it->second;
}

std::string ConsensusSpec::key() const { return impl_->key; }

std::optional<CandidateSet> ConsensusSpec::fixed_candidates() const { return impl_->fixed; }

namespace {

// Support of a profile / point as ranking indices.
std::vector<std::size_t> support_of(const AnonymousProfile& E) {
  std::vector<std::size_t> s;
  for (std::size_t t = 0; t < E.counts.size(); ++t)
    if (E.counts[t] > 0) s.push_back(t);
  return s;
}

std::vector<std::size_t> support_of(const SimplexPoint& x) {
  std::vector<std::size_t> s;
  for (std::size_t t = 0; t < x.coords.size(); ++t)
    if (x.coords[t] != 0) s.push_back(t);
  return s;
}

// Membership for ballot-class kinds given the support.
std::optional<SRanking> ballot_membership(const ConsensusSpec& K, const CandidateSet& C,
                                          const std::vector<std::size_t>& support) {
  if (support.empty()) fail_domain("membership of an empty profile");
  const auto& all = enumerate_rankings(C.size());
  if (K.kind() == ConsensusKind::GeneralizedUnanimity) {
    for (const SRanking& r : K.outcomes(C)) {
      const auto ballots = K.ballot_class(C, r);
      bool ok = true;
      for (std::size_t t : support)
        if (!std::binary_search(ballots.begin(), ballots.end(), all[t])) {
          ok = false;
          break;
        }
      if (ok) return r;
    }
    return std::nullopt;
  }
  const int s = K.s(C.size());
  const SRanking r = SRanking::prefix_of(all[support.front()], s);
  for (std::size_t t : support)
    if (!has_prefix(all[t], r)) return std::nullopt;
  return r;
}

// Is x on the segment, respecting open ends? Exact rational test.
bool on_segment(const SimplexPoint& x, const Segment& seg) {
  const std::size_t M = x.coords.size();
  if (seg.a.coords == seg.b.coords) {
    // zero-length: construction guarantees one closed end
    return x.coords == seg.a.coords;
  }
  // Solve x = a + t (b - a) componentwise.
  std::optional<Rat> t;
  for (std::size_t i = 0; i < M; ++i) {
    const Rat dir = seg.b.coords[i] - seg.a.coords[i];
    const Rat off = x.coords[i] - seg.a.coords[i];
    if (dir == 0) {
      if (off != 0) return false;
    } else if (!t) {
      t = off / dir;
    } else if (*t * dir != off) {
      return false;
    }
  }
  if (!t) return false;
  if (*t < 0 || *t > 1) return false;
  if (*t == 0 && !seg.a_closed) return false;
  if (*t == 1 && !seg.b_closed) return false;
  return true;
}

std::optional<SRanking> simplex_membership(const ConsensusSpec& K, const SimplexPoint& x) {
  std::vector<SRanking> hits;
  for (const SRanking& r : K.outcomes(x.candidates)) {
    bool in = false;
    if (K.kind() == ConsensusKind::PointSets) {
      for (const SimplexPoint& p : K.points_of(r))
        if (p.coords == x.coords) {
          in = true;
          break;
        }
    } else {
      for (const Segment& seg : K.segments_of(r))
        if (on_segment(x, seg)) {
          in = true;
          break;
        }
    }
    if (in) hits.push_back(r);
  }
  if (hits.size() > 1) fail_domain("point lies in two consensus classes; membership is ambiguous");
  if (hits.empty()) return std::nullopt;
  return hits.front();
}

}  // namespace

std::optional<SRanking> membership(const ConsensusSpec& K, const AnonymousProfile& E) {
  switch (K.kind()) {
    case ConsensusKind::Condorcet: {
      auto w = condorcet_winner(E);
      if (!w) return std::nullopt;
      return SRanking::of_candidate(*w);
    }
    case ConsensusKind::PointSets:
    case ConsensusKind::SegmentSets:
      return simplex_membership(K, vote_distribution(E));
    default:
      return ballot_membership(K, E.candidates, support_of(E));
  }
}

std::optional<SRanking> membership(const ConsensusSpec& K, const SimplexPoint& x) {
  switch (K.kind()) {
    case ConsensusKind::Condorcet: {
      auto w = condorcet_winner(x);
      if (!w) return std::nullopt;
      return SRanking::of_candidate(*w);
    }
    case ConsensusKind::PointSets:
    case ConsensusKind::SegmentSets:
      return simplex_membership(K, x);
    default:
      return ballot_membership(K, x.candidates, support_of(x));
  }
}

Ranking vmp_minimizer(const ConsensusSpec& K, const CandidateSet& C, const GroundMetric& g,
                      const Ranking& t, const SRanking& r) {
  if (!K.has_ballot_classes())
    fail_domain("per-ballot minimizers exist only for ballot-class consensuses");
  const auto ballots = K.ballot_class(C, r);
  const Ranking* best = nullptr;
  Rat best_d;
  for (const Ranking& rho : ballots) {  // lexicographic: first strict improvement wins ties
    const Rat d = ground_distance(g, t, rho);
    if (!best || d < best_d) {
      best = &rho;
      best_d = d;
    }
  }
  if (!best) fail_internal("ballot classes are validated nonempty");
  return *best;
}

std::shared_ptr<const std::vector<Rat>> delta_table(const ConsensusSpec& K, const CandidateSet& C,
                                                    const GroundMetric& g, const SRanking& r) {
  if (!K.has_ballot_classes())
    fail_domain("delta tables exist only for ballot-class consensuses");
  const auto& impl = *K.impl();
  const std::string gkey = g.key() + "|m=" + std::to_string(C.size());
  std::lock_guard<std::mutex> lock(impl.memo_mu);
  auto it = impl.memo.find({gkey, r});
  if (it != impl.memo.end()) return it->second;
  const auto& all = enumerate_rankings(C.size());
  auto table = std::make_shared<std::vector<Rat>>();
  table->reserve(all.size());
  for (const Ranking& t : all)
    table->push_back(ground_distance(g, t, vmp_minimizer(K, C, g, t, r)));
  impl.memo.emplace(std::make_pair(gkey, r), table);
  return table;
}

namespace {

// Exact minimum assignment cost between two equal multisets of ranking
// indices, branch and bound over permutations.
Rat min_assignment(const std::vector<std::size_t>& from, const std::vector<std::size_t>& to,
                   const std::vector<std::vector<Rat>>& cost_pow) {
  const std::size_t k = from.size();
  std::vector<bool> used(k, false);
  std::optional<Rat> best;
  Rat cur = 0;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (best && cur >= *best) return;
    if (i == k) {
      best = cur;
      return;
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (used[j]) continue;
      used[j] = true;
      const Rat c = cost_pow[from[i]][to[j]];
      cur += c;
      self(self, i + 1);
      cur -= c;
      used[j] = false;
    }
  };
  rec(rec, 0);
  return *best;
}

// Enumerate size-k multisets over `limits` (count per type), nondecreasing
// type order, calling fn(counts).
template <typename Fn>
void for_each_multiset(const std::vector<long long>& limits, long long k, Fn&& fn) {
  std::vector<long long> chosen(limits.size(), 0);
  auto rec = [&](auto&& self, std::size_t type, long long left) -> void {
    if (left == 0) {
      fn(chosen);
      return;
    }
    if (type == limits.size()) return;
    // Feasibility: remaining capacity must cover `left`.
    const long long take = std::min(limits[type], left);
    for (long long c = 0; c <= take; ++c) {
      chosen[type] = c;
      self(self, type + 1, left - c);
    }
    chosen[type] = 0;
  };
  rec(rec, 0, k);
}

std::vector<std::size_t> expand_counts(const std::vector<long long>& counts) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < counts.size(); ++t)
    for (long long i = 0; i < counts[t]; ++i) out.push_back(t);
  return out;
}

// Minimum cost over changes of ballots turning E into a member of the
// Condorcet class of candidate c, in the p-th power convention. Enumerates
// the number k of changed ballots in increasing order; any further k is
// bounded below by k * (min positive ground distance)^p, so the search stops
// as soon as that bound passes the incumbent.
Rat condorcet_distance(const GroundMetric& g, unsigned p, const AnonymousProfile& E, int c,
                       const CondorcetSearchBounds& bounds) {
  const int m = E.candidates.size();
  if (m > bounds.max_m)
    fail_capacity("condorcet brute force capped at m = " + std::to_string(bounds.max_m));
  const long long n = E.n();
  if (n > bounds.max_n)
    fail_capacity("condorcet brute force capped at n = " + std::to_string(bounds.max_n));
  if (condorcet_winner(E) == std::optional<int>(c)) return Rat(0);

  const auto& all = enumerate_rankings(m);
  const std::size_t M = all.size();
  const Rat minpos_p = rat_pow(min_positive_ground_distance(g, m), p);
  std::vector<std::vector<Rat>> cost_pow(M, std::vector<Rat>(M));
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      cost_pow[i][j] = rat_pow(ground_distance(g, all[i], all[j]), p);

  std::optional<Rat> best;
  std::vector<long long> add_limits(M, 0);
  for (long long k = 1; k <= n; ++k) {
    if (best && rat_of(k) * minpos_p >= *best) break;
    for_each_multiset(E.counts, k, [&](const std::vector<long long>& removed) {
      // Additions may not reuse a removed type: a shared type is a no-op swap
      // that a smaller k already covers.
      for (std::size_t t = 0; t < M; ++t) add_limits[t] = removed[t] > 0 ? 0 : k;
      for_each_multiset(add_limits, k, [&](const std::vector<long long>& added) {
        AnonymousProfile next = E;
        for (std::size_t t = 0; t < M; ++t)
          next.counts[t] += added[t] - removed[t];
        if (condorcet_winner(next) != std::optional<int>(c)) return;
        const Rat cost =
            min_assignment(expand_counts(removed), expand_counts(added), cost_pow);
        if (!best || cost < *best) best = cost;
      });
    });
  }
  if (!best) fail_internal("replacing every ballot reaches the class, so a bound must exist");
  return *best;
}

}  // namespace

ExtRat distance_to_consensus(const ConsensusSpec& K, const VotewiseSpec& spec,
                             const AnonymousProfile& E, const SRanking& r,
                             const CondorcetSearchBounds& bounds) {
  const long long n = E.n();
  if (n <= 0) fail_domain("distance from an empty profile");
  switch (K.kind()) {
    case ConsensusKind::Condorcet: {
      if (r.size() != 1) fail_domain("condorcet outcomes are single candidates");
      if (spec.p.is_inf())
        fail_domain("condorcet brute force needs a finite exponent");
      Rat d = condorcet_distance(spec.ground, spec.p.p(), E, r.at(0), bounds);
      if (spec.normalized) d /= rat_pow(rat_of(n), spec.p.p());
      return ExtRat(d);
    }
    case ConsensusKind::PointSets:
    case ConsensusKind::SegmentSets:
      fail_domain("simplex-set consensuses take simplex distances, not votewise ones");
    default:
      break;
  }
  // Ballot-class kinds: the per-ballot minimizer is optimal, so the distance
  // is a weighted sum (finite p) or max (p = inf) of delta values.
  if (K.kind() == ConsensusKind::GeneralizedUnanimity) {
    require_same_candidates(*K.impl(), E.candidates);
    const auto& classes = K.impl()->classes;
    if (classes.find(r) == classes.end()) return ExtRat::infinity();  // empty class
  }
  auto table = delta_table(K, E.candidates, spec.ground, r);
  if (spec.p.is_inf()) {
    Rat worst = 0;
    for (std::size_t t = 0; t < E.counts.size(); ++t)
      if (E.counts[t] > 0) worst = std::max(worst, (*table)[t]);
    if (spec.normalized) worst /= rat_of(n);
    return ExtRat(worst);
  }
  const unsigned p = spec.p.p();
  Rat sum = 0;
  for (std::size_t t = 0; t < E.counts.size(); ++t)
    if (E.counts[t] > 0) sum += rat_of(E.counts[t]) * rat_pow((*table)[t], p);
  if (spec.normalized) sum /= rat_pow(rat_of(n), p);
  return ExtRat(sum);
}

ConsensusSpec parse_generalized_unanimity_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail_parse(std::string("bad consensus JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("candidates") || !j.contains("classes"))
    fail_parse("consensus JSON needs \"candidates\" and \"classes\"");
  std::vector<std::string> names;
  for (const auto& c : j["candidates"]) {
    if (!c.is_string()) fail_parse("candidate names must be strings");
    names.push_back(c.get<std::string>());
  }
  CandidateSet C(names);
  if (!j["classes"].is_object()) fail_parse("\"classes\" must map labels to ranking lists");
  std::map<SRanking, std::vector<Ranking>> classes;
  for (const auto& [label, ballots] : j["classes"].items()) {
    SRanking r = parse_sranking(C, label);
    std::vector<Ranking> members;
    if (!ballots.is_array()) fail_parse("class '" + label + "' must be a list of rankings");
    for (const auto& b : ballots) {
      if (!b.is_string()) fail_parse("class members must be ranking strings");
      members.push_back(parse_ranking(C, b.get<std::string>()));
    }
    if (!classes.emplace(std::move(r), std::move(members)).second)
      fail_parse("duplicate class label '" + label + "'");
  }
  return ConsensusSpec::generalized_unanimity(std::move(C), std::move(classes));
}

}  // namespace drvote
