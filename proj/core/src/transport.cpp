#include "drvote/transport.hpp"

#include <algorithm>
#include <optional>

namespace drvote {

namespace {

// Exact min-cost transportation problem: positive integer supplies a_i and
// demands b_j with equal totals, integer costs c_ij >= 0, unbounded edge
// capacities. Successive shortest paths with node potentials; every path is
// found by a dense Dijkstra over reduced costs, which stay nonnegative.
struct FlowSolution {
  std::vector<std::vector<Int>> flow;
  Int total_cost;
};

FlowSolution solve_transportation(const std::vector<Int>& a, const std::vector<Int>& b,
                                  const std::vector<std::vector<Int>>& c) {
  const std::size_t A = a.size(), B = b.size();
  std::vector<Int> rem_supply = a, rem_demand = b;
  std::vector<std::vector<Int>> flow(A, std::vector<Int>(B, 0));
  std::vector<Int> pot_src(A, 0), pot_sink(B, 0);

  Int outstanding = 0;
  for (const Int& s : a) outstanding += s;
  {
    Int check = 0;
    for (const Int& d : b) check += d;
    if (check != outstanding) fail_internal("transportation marginals do not balance");
  }

  while (outstanding > 0) {
    // Dijkstra over the residual graph. Node order: sources then sinks.
    const std::size_t N = A + B;
    std::vector<Int> dist(N, 0);
    std::vector<bool> reached(N, false), done(N, false);
    std::vector<int> parent(N, -1);  // for sinks: source index; for sources: A + sink index
    for (std::size_t i = 0; i < A; ++i)
      if (rem_supply[i] > 0) reached[i] = true;

    std::optional<std::size_t> target;
    for (;;) {
      std::size_t u = N;
      for (std::size_t v = 0; v < N; ++v)
        if (reached[v] && !done[v] && (u == N || dist[v] < dist[u])) u = v;
      if (u == N) break;
      done[u] = true;
      if (u >= A) {
        const std::size_t j = u - A;
        if (rem_demand[j] > 0 && !target) target = j;
        // Residual backward edges j -> i exist where flow is positive.
        for (std::size_t i = 0; i < A; ++i) {
          if (flow[i][j] == 0 || done[i]) continue;
          Int nd = dist[u] + (-c[i][j] + pot_sink[j] - pot_src[i]);
          if (!reached[i] || nd < dist[i]) {
            reached[i] = true;
            dist[i] = nd;
            parent[i] = static_cast<int>(A + j);
          }
        }
      } else {
        const std::size_t i = u;
        for (std::size_t j = 0; j < B; ++j) {
          if (done[A + j]) continue;
          Int nd = dist[u] + (c[i][j] + pot_src[i] - pot_sink[j]);
          if (!reached[A + j] || nd < dist[A + j]) {
            reached[A + j] = true;
            dist[A + j] = nd;
            parent[A + j] = static_cast<int>(i);
          }
        }
      }
    }
    if (!target) fail_internal("transportation network must stay connected");

    // Update potentials by the found distances (clamped at the target's).
    const Int dt = dist[A + *target];
    for (std::size_t i = 0; i < A; ++i)
      if (reached[i]) pot_src[i] += std::min(dist[i], dt);
    for (std::size_t j = 0; j < B; ++j)
      if (reached[A + j]) pot_sink[j] += std::min(dist[A + j], dt);

    // Reconstruct the alternating path back to its starting source.
    std::vector<std::pair<std::size_t, std::size_t>> forward, backward;
    std::size_t start_source = 0;
    {
      std::size_t u = A + *target;
      for (;;) {
        if (u >= A) {
          const std::size_t i = static_cast<std::size_t>(parent[u]);
          forward.emplace_back(i, u - A);
          if (parent[i] == -1) {
            start_source = i;
            break;
          }
          u = i;
        } else {
          const std::size_t j = static_cast<std::size_t>(parent[u]) - A;
          backward.emplace_back(u, j);
          u = A + j;
        }
      }
    }

    Int push = std::min(rem_demand[*target], rem_supply[start_source]);
    for (const auto& [i, j] : backward) push = std::min(push, flow[i][j]);
    if (push <= 0) fail_internal("degenerate augmentation");

    for (const auto& [i, j] : forward) flow[i][j] += push;
    for (const auto& [i, j] : backward) flow[i][j] -= push;
    rem_demand[*target] -= push;
    rem_supply[start_source] -= push;
    outstanding -= push;
  }

  Int total = 0;
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < B; ++j) total += flow[i][j] * c[i][j];

  // Optimality certificate: marginals, nonnegativity, complementary slackness.
  for (std::size_t i = 0; i < A; ++i) {
    Int row = 0;
    for (std::size_t j = 0; j < B; ++j) {
      if (flow[i][j] < 0) fail_internal("negative flow in certified solution");
      row += flow[i][j];
    }
    if (row != a[i]) fail_internal("row marginal violated in certified solution");
  }
  for (std::size_t j = 0; j < B; ++j) {
    Int col = 0;
    for (std::size_t i = 0; i < A; ++i) col += flow[i][j];
    if (col != b[j]) fail_internal("column marginal violated in certified solution");
  }
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < B; ++j) {
      const Int reduced = c[i][j] + pot_src[i] - pot_sink[j];
      if (reduced < 0) fail_internal("negative reduced cost in certified solution");
      if (flow[i][j] > 0 && reduced != 0)
        fail_internal("slackness violated in certified solution");
    }

  return {std::move(flow), std::move(total)};
}

}  // namespace

TransportResult wasserstein(const GroundMetric& g, unsigned p, const SimplexPoint& x,
                            const SimplexPoint& y, const TransportOptions& opts) {
  if (p < 1) fail_domain("wasserstein needs p >= 1");
  if (!(x.candidates == y.candidates))
    fail_domain("wasserstein between different candidate sets");
  const int m = x.candidates.size();
  if (m > 6 && !opts.allow_large_m)
    fail_capacity("wasserstein at m in {7, 8} must be enabled explicitly");
  const auto& all = enumerate_rankings(m);
  const std::size_t M = all.size();

  // Keep only the support on each side.
  std::vector<std::size_t> sup_x, sup_y;
  for (std::size_t t = 0; t < M; ++t) {
    if (x.coords[t] > 0) sup_x.push_back(t);
    if (y.coords[t] > 0) sup_y.push_back(t);
  }

  // Clear denominators: marginals times L, costs times D.
  Int L = lcm_of_denominators(x.coords);
  {
    const Int Ly = lcm_of_denominators(y.coords);
    mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), Ly.get_mpz_t());
  }
  std::vector<Rat> cost_pow(M * M);
  std::vector<Rat> flat;
  flat.reserve(sup_x.size() * sup_y.size());
  for (std::size_t i : sup_x)
    for (std::size_t j : sup_y) {
      Rat cp = rat_pow(ground_distance(g, all[i], all[j]), p);
      cost_pow[i * M + j] = cp;
      flat.push_back(cp);
    }
  const Int D = lcm_of_denominators(flat);

  std::vector<Int> a, b;
  for (std::size_t i : sup_x) a.push_back(Int(Rat(x.coords[i] * L).get_num()));
  for (std::size_t j : sup_y) b.push_back(Int(Rat(y.coords[j] * L).get_num()));
  std::vector<std::vector<Int>> c(sup_x.size(), std::vector<Int>(sup_y.size()));
  for (std::size_t i = 0; i < sup_x.size(); ++i)
    for (std::size_t j = 0; j < sup_y.size(); ++j)
      c[i][j] = Int(Rat(cost_pow[sup_x[i] * M + sup_y[j]] * D).get_num());

  FlowSolution sol = solve_transportation(a, b, c);

  TransportResult out;
  out.p = p;
  out.cost_pth_power = make_rat(sol.total_cost, L * D);
  if (opts.want_coupling) {
    out.coupling.assign(M, std::vector<Rat>(M, Rat(0)));
    for (std::size_t i = 0; i < sup_x.size(); ++i)
      for (std::size_t j = 0; j < sup_y.size(); ++j)
        if (sol.flow[i][j] != 0)
          out.coupling[sup_x[i]][sup_y[j]] = make_rat(sol.flow[i][j], L);
  }
  return out;
}

Rat total_variation(const SimplexPoint& x, const SimplexPoint& y) {
  if (!(x.candidates == y.candidates))
    fail_domain("total variation between different candidate sets");
  Rat sum = 0;
  for (std::size_t t = 0; t < x.coords.size(); ++t) sum += rat_abs(x.coords[t] - y.coords[t]);
  return sum / 2;
}

namespace {

Rat min_bijection_cost(const std::vector<std::size_t>& from, const std::vector<std::size_t>& to,
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
      cur += cost_pow[from[i]][to[j]];
      self(self, i + 1);
      cur -= cost_pow[from[i]][to[j]];
      used[j] = false;
    }
  };
  rec(rec, 0);
  return *best;
}

}  // namespace

Rat quotient_bruteforce(const GroundMetric& g, unsigned p, const SimplexPoint& x,
                        const SimplexPoint& y, long long n, long long max_n) {
  if (n > max_n)
    fail_capacity("bijection oracle capped at n = " + std::to_string(max_n));
  const AnonymousProfile ax = realize(x, n), ay = realize(y, n);
  const auto& all = enumerate_rankings(x.candidates.size());
  const std::size_t M = all.size();
  std::vector<std::vector<Rat>> cost_pow(M, std::vector<Rat>(M));
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      cost_pow[i][j] = rat_pow(ground_distance(g, all[i], all[j]), p);
  std::vector<std::size_t> bx, by;
  for (std::size_t t = 0; t < M; ++t) {
    for (long long k = 0; k < ax.counts[t]; ++k) bx.push_back(t);
    for (long long k = 0; k < ay.counts[t]; ++k) by.push_back(t);
  }
  return min_bijection_cost(bx, by, cost_pow) / rat_of(n);
}

Rat kr_norm(const GroundMetric& g, const std::vector<Rat>& v) {
  int m = 0;
  for (int try_m = 1; try_m <= kMaxEnumerationCandidates; ++try_m)
    if (factorial(try_m) == static_cast<long long>(v.size())) {
      m = try_m;
      break;
    }
  if (m == 0) fail_domain("vector length is not m! for any supported m");
  Rat sum = 0;
  for (const Rat& c : v) sum += c;
  if (sum != 0) fail_domain("kantorovich norm needs a zero-sum vector");

  const auto& all = enumerate_rankings(m);
  std::vector<std::size_t> pos, neg;
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (v[t] > 0) pos.push_back(t);
    if (v[t] < 0) neg.push_back(t);
  }
  if (pos.empty()) return Rat(0);

  const Int L = lcm_of_denominators(v);
  std::vector<Rat> flat;
  for (std::size_t i : pos)
    for (std::size_t j : neg) flat.push_back(ground_distance(g, all[i], all[j]));
  const Int D = lcm_of_denominators(flat);

  std::vector<Int> a, b;
  for (std::size_t i : pos) a.push_back(Int(Rat(v[i] * L).get_num()));
  for (std::size_t j : neg) b.push_back(Int(Rat(-v[j] * L).get_num()));
  std::vector<std::vector<Int>> c(pos.size(), std::vector<Int>(neg.size()));
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = 0; j < neg.size(); ++j)
      c[i][j] = Int(Rat(ground_distance(g, all[pos[i]], all[neg[j]]) * D).get_num());

  FlowSolution sol = solve_transportation(a, b, c);
  return make_rat(sol.total_cost, L * D);
}

}  // namespace drvote
