#include "drvote/rankings.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>

namespace drvote {

CandidateSet::CandidateSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) fail_domain("empty candidate set");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) fail_domain("empty candidate name");
    if (!seen.insert(n).second) fail_domain("duplicate candidate name '" + n + "'");
  }
}

CandidateSet CandidateSet::alphabet(int m) {
  if (m < 1 || m > 26) fail_domain("alphabet candidate set needs 1 <= m <= 26");
  std::vector<std::string> names;
  for (int i = 0; i < m; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return CandidateSet(std::move(names));
}

int CandidateSet::index_of(const std::string& name) const {
  auto i = find(name);
  if (!i) fail_domain("unknown candidate '" + name + "'");
  return *i;
}

std::optional<int> CandidateSet::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

Ranking::Ranking(std::vector<int> order) : order_(std::move(order)) {
  if (order_.empty()) fail_domain("empty ranking");
  std::vector<bool> seen(order_.size(), false);
  for (int c : order_) {
    if (c < 0 || c >= size() || seen[c]) fail_domain("ranking is not a permutation");
    seen[c] = true;
  }
}

int Ranking::rank_of(int candidate) const {
  for (int pos = 0; pos < size(); ++pos)
    if (order_[pos] == candidate) return pos + 1;
  fail_domain("candidate index out of range for ranking");
}

SRanking::SRanking(std::vector<int> prefix) : prefix_(std::move(prefix)) {
  if (prefix_.empty()) fail_domain("empty s-ranking");
  std::set<int> seen;
  for (int c : prefix_) {
    if (c < 0) fail_domain("negative candidate index in s-ranking");
    if (!seen.insert(c).second) fail_domain("repeated candidate in s-ranking");
  }
}

SRanking SRanking::prefix_of(const Ranking& r, int s) {
  if (s < 1 || s > r.size()) fail_domain("s-ranking length out of range");
  return SRanking(std::vector<int>(r.order().begin(), r.order().begin() + s));
}

long long factorial(int m) {
  if (m < 0) fail_domain("factorial of negative number");
  long long f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

const std::vector<Ranking>& enumerate_rankings(int m) {
  if (m < 1) fail_domain("enumerate_rankings needs m >= 1");
  if (m > kMaxEnumerationCandidates)
    fail_capacity("ranking enumeration capped at m = " +
                  std::to_string(kMaxEnumerationCandidates) + ", got m = " + std::to_string(m));
  static std::mutex mu;
  static std::map<int, std::vector<Ranking>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::vector<Ranking> all;
  all.reserve(factorial(m));
  do {
    all.push_back(Ranking(order));
  } while (std::next_permutation(order.begin(), order.end()));
  return cache.emplace(m, std::move(all)).first->second;
}

long long ranking_index(const Ranking& r) {
  // Lehmer code: index = sum over positions of (#smaller candidates to the right) * (m-1-pos)!
  const int m = r.size();
  long long idx = 0;
  for (int i = 0; i < m; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < m; ++j)
      if (r.at(j) < r.at(i)) ++smaller;
    idx += smaller * factorial(m - 1 - i);
  }
  return idx;
}

const Ranking& ranking_from_index(int m, long long i) {
  const auto& all = enumerate_rankings(m);
  if (i < 0 || i >= static_cast<long long>(all.size()))
    fail_domain("ranking index out of range");
  return all[static_cast<std::size_t>(i)];
}

int rank_of(const Ranking& r, int candidate) { return r.rank_of(candidate); }

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<int> parse_chain(const CandidateSet& C, const std::string& text) {
  std::vector<int> out;
  for (const auto& name : split(text, '>')) {
    if (name.empty()) fail_parse("malformed ranking '" + text + "'");
    out.push_back(C.index_of(name));
  }
  return out;
}

}  // namespace

Ranking parse_ranking(const CandidateSet& C, const std::string& text) {
  auto chain = parse_chain(C, text);
  std::vector<char> seen(static_cast<std::size_t>(C.size()), 0);
  bool repeated = false;
  for (int c : chain) {
    repeated = repeated || seen[static_cast<std::size_t>(c)];
    seen[static_cast<std::size_t>(c)] = 1;
  }
  if (static_cast<int>(chain.size()) != C.size() || repeated)
    fail_parse("ranking '" + text + "' does not mention every candidate exactly once");
  return Ranking(std::move(chain));
}

SRanking parse_sranking(const CandidateSet& C, const std::string& text) {
  auto chain = parse_chain(C, text);
  if (static_cast<int>(chain.size()) > C.size())
    fail_parse("s-ranking '" + text + "' longer than the candidate set");
  return SRanking(std::move(chain));
}

std::string format_ranking(const CandidateSet& C, const Ranking& r) {
  std::string out;
  for (int i = 0; i < r.size(); ++i) {
    if (i) out += '>';
    out += C.name(r.at(i));
  }
  return out;
}

std::string format_sranking(const CandidateSet& C, const SRanking& r) {
  std::string out;
  for (int i = 0; i < r.size(); ++i) {
    if (i) out += '>';
    out += C.name(r.at(i));
  }
  return out;
}

namespace {

void check_weights(const std::vector<Rat>& w) {
  if (w.size() < 2) fail_domain("rank weights need length >= 2");
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] < w[i + 1]) fail_domain("rank weights must be nonincreasing");
  if (w.front() == w.back()) fail_domain("rank weights must not be constant");
}

}  // namespace

GroundMetric GroundMetric::weighted_footrule(std::vector<Rat> w) {
  check_weights(w);
  return {GroundKind::WeightedFootrule, std::move(w)};
}

GroundMetric GroundMetric::weighted_kendall(std::vector<Rat> w) {
  check_weights(w);
  if (w.size() > 5) fail_capacity("weighted kendall path search capped at m = 5");
  return {GroundKind::WeightedKendall, std::move(w)};
}

GroundMetric GroundMetric::borda_footrule(int m) {
  std::vector<Rat> w;
  for (int i = 0; i < m; ++i) w.push_back(Rat(m - 1 - i));
  return weighted_footrule(std::move(w));
}

std::string GroundMetric::key() const {
  std::string k;
  switch (kind) {
    case GroundKind::Discrete: k = "discrete"; break;
    case GroundKind::Kendall: k = "kendall"; break;
    case GroundKind::Footrule: k = "footrule"; break;
    case GroundKind::WeightedFootrule: k = "wfootrule"; break;
    case GroundKind::WeightedKendall: k = "wkendall"; break;
  }
  for (const Rat& w : weights) k += ":" + format_rat(w);
  return k;
}

namespace {

long long kendall_tau(const Ranking& a, const Ranking& b) {
  // Discordant pairs; m <= 8 so the quadratic scan is fine.
  const int m = a.size();
  long long inv = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const int c1 = a.at(i), c2 = a.at(j);  // a prefers c1 over c2
      if (b.rank_of(c1) > b.rank_of(c2)) ++inv;
    }
  return inv;
}

// Cheapest path in the adjacent-transposition graph where swapping slots
// (i, i+1) costs |w_i - w_{i+1}|. Dijkstra over all m! rankings.
Rat weighted_kendall_distance(const std::vector<Rat>& w, const Ranking& a, const Ranking& b) {
  const int m = a.size();
  const auto& all = enumerate_rankings(m);
  const std::size_t n = all.size();
  std::vector<Rat> cost(m - 1);
  for (int i = 0; i + 1 < m; ++i) cost[i] = rat_abs(w[i] - w[i + 1]);

  std::vector<Rat> dist(n);
  std::vector<bool> known(n, false), reached(n, false);
  const std::size_t src = static_cast<std::size_t>(ranking_index(a));
  const std::size_t dst = static_cast<std::size_t>(ranking_index(b));
  dist[src] = 0;
  reached[src] = true;
  for (;;) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v)
      if (reached[v] && !known[v] && (best == n || dist[v] < dist[best])) best = v;
    if (best == n) fail_internal("adjacent-swap graph is connected; search must reach target");
    if (best == dst) return dist[best];
    known[best] = true;
    std::vector<int> order = all[best].order();
    for (int i = 0; i + 1 < m; ++i) {
      std::swap(order[i], order[i + 1]);
      const std::size_t u = static_cast<std::size_t>(ranking_index(Ranking(order)));
      const Rat d = dist[best] + cost[i];
      if (!reached[u] || d < dist[u]) {
        reached[u] = true;
        dist[u] = d;
      }
      std::swap(order[i], order[i + 1]);
    }
  }
}

}  // namespace

Rat ground_distance(const GroundMetric& g, const Ranking& a, const Ranking& b) {
  if (a.size() != b.size()) fail_domain("ground distance between rankings of different size");
  const int m = a.size();
  switch (g.kind) {
    case GroundKind::Discrete:
      return Rat(a == b ? 0 : 1);
    case GroundKind::Kendall:
      return rat_of(kendall_tau(a, b));
    case GroundKind::Footrule: {
      long long s = 0;
      for (int c = 0; c < m; ++c) s += std::abs(a.rank_of(c) - b.rank_of(c));
      return rat_of(s);
    }
    case GroundKind::WeightedFootrule: {
      if (static_cast<int>(g.weights.size()) != m)
        fail_domain("weighted footrule weights do not match candidate count");
      Rat s = 0;
      for (int c = 0; c < m; ++c)
        s += rat_abs(g.weights[a.rank_of(c) - 1] - g.weights[b.rank_of(c) - 1]);
      return s;
    }
    case GroundKind::WeightedKendall:
      if (static_cast<int>(g.weights.size()) != m)
        fail_domain("weighted kendall weights do not match candidate count");
      return weighted_kendall_distance(g.weights, a, b);
  }
  fail_internal("unreachable ground kind");
}

Rat max_ground_distance(const GroundMetric& g, int m) {
  const auto& all = enumerate_rankings(m);
  Rat best = 0;
  for (const Ranking& t : all) best = std::max(best, ground_distance(g, all.front(), t));
  return best;
}

Rat min_positive_ground_distance(const GroundMetric& g, int m) {
  const auto& all = enumerate_rankings(m);
  std::optional<Rat> best;
  for (const Ranking& t : all) {
    if (t == all.front()) continue;
    // Candidate-relabeling invariance: pairs (id, t) cover all distance values.
    Rat d = ground_distance(g, all.front(), t);
    if (d == 0) fail_domain("ground is a pseudometric: distinct rankings at distance 0");
    if (!best || d < *best) best = d;
  }
  if (!best) fail_domain("single-ranking space has no positive distances");
  return *best;
}

}  // namespace drvote
