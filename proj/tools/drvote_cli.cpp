// drvote: batch front-end for the voting-distance library.
//
// Subcommands: winners, score, wasserstein, bisector, partition, verify,
// boundary, diagnose, gen. All reports are deterministic given the inputs
// and --seed; rationals are printed as "p/q" strings, and --emit csv
// converts to decimals at an explicit --precision.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/parse error,
// 3 capacity error.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "drvote/dr_engine.hpp"
#include "drvote/geometry.hpp"
#include "drvote/rng.hpp"

namespace {

using njson = nlohmann::ordered_json;
using namespace drvote;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_parse("cannot read file '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Fixed-precision decimal rendering of an exact rational (round half away
// from zero). CSV output only; JSON keeps the exact "p/q" form.
std::string rat_decimal(const Rat& r, int precision) {
  Int num = r.get_num();
  Int den = r.get_den();
  const bool neg = num < 0;
  if (neg) num = -num;
  Int ip = num / den;
  Int rem = num % den;
  std::string frac;
  for (int i = 0; i < precision; ++i) {
    rem *= 10;
    frac += static_cast<char>('0' + Int(rem / den).get_si());
    rem %= den;
  }
  rem *= 10;
  if (rem / den >= 5) {
    int i = precision - 1;
    for (; i >= 0; --i) {
      if (frac[static_cast<std::size_t>(i)] != '9') {
        ++frac[static_cast<std::size_t>(i)];
        break;
      }
      frac[static_cast<std::size_t>(i)] = '0';
    }
    if (i < 0) ip += 1;
  }
  std::string out = (neg && (ip != 0 || frac.find_first_not_of('0') != std::string::npos))
                        ? "-"
                        : "";
  out += ip.get_str();
  if (precision > 0) out += "." + frac;
  return out;
}

std::string double_decimal(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

std::string ext_str(const ExtRat& v) { return v.str(); }

PNorm parse_pnorm(const std::string& text) {
  if (text == "inf") return PNorm::inf();
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    fail_parse("norm exponent must be a positive integer or 'inf', got '" + text + "'");
  unsigned long v = 0;
  try {
    v = std::stoul(text);
  } catch (const std::exception&) {
    fail_parse("norm exponent '" + text + "' out of range");
  }
  if (v < 1) fail_domain("norm exponent must satisfy p >= 1");
  return PNorm::finite(static_cast<unsigned>(v));
}

std::vector<Rat> parse_weight_list(const std::string& text) {
  std::vector<Rat> w;
  for (const std::string& part : split(text, ';')) w.push_back(parse_rat(trim(part)));
  return w;
}

GroundMetric parse_ground(const std::string& token, int m) {
  if (token == "discrete" || token == "hamming") return GroundMetric::discrete();
  if (token == "kendall") return GroundMetric::kendall();
  if (token == "footrule") return GroundMetric::footrule();
  if (token == "borda-footrule") return GroundMetric::borda_footrule(m);
  if (token.rfind("wfootrule:", 0) == 0)
    return GroundMetric::weighted_footrule(parse_weight_list(token.substr(10)));
  if (token.rfind("wkendall:", 0) == 0)
    return GroundMetric::weighted_kendall(parse_weight_list(token.substr(9)));
  fail_parse("unknown ground metric '" + token +
             "' (expected discrete|hamming|kendall|footrule|borda-footrule|"
             "wfootrule:w1;w2;..|wkendall:w1;w2;..)");
}

ConsensusSpec parse_consensus(const std::string& token, int m) {
  if (token == "wunam") return ConsensusSpec::weak_unanimity();
  if (token == "cond") return ConsensusSpec::condorcet();
  if (token == "sunam") return ConsensusSpec::strong_unanimity(m);
  if (token.rfind("sunam:", 0) == 0) {
    const std::string stext = token.substr(6);
    if (stext.empty() || stext.find_first_not_of("0123456789") != std::string::npos)
      fail_parse("bad prefix length in '" + token + "'");
    const int s = std::stoi(stext);
    if (s < 1 || s > m)
      fail_domain("prefix length " + std::to_string(s) + " outside 1.." + std::to_string(m));
    return ConsensusSpec::strong_unanimity(s);
  }
  if (token == "nonconvex") {
    if (m != 3) fail_domain("the built-in nonconvex consensus is defined for m = 3");
    return nonconvex_example_consensus();
  }
  if (token.rfind("genunam:", 0) == 0)
    return parse_generalized_unanimity_json(read_file(token.substr(8)));
  fail_parse("unknown consensus '" + token +
             "' (expected wunam|sunam|sunam:s|cond|genunam:file|nonconvex)");
}

RuleDistance parse_distance(const std::vector<std::string>& toks, int m) {
  if (toks.empty()) fail_parse("rule needs a distance after the consensus");
  const std::string& kind = toks[0];
  PNorm p = PNorm::finite(1);
  bool have_p = false;
  bool normalized = false;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    if (toks[i] == "norm") {
      normalized = true;
    } else if (toks[i].rfind("p=", 0) == 0) {
      p = parse_pnorm(toks[i].substr(2));
      have_p = true;
    } else {
      fail_parse("unknown rule flag '" + toks[i] + "'");
    }
  }
  if (kind == "t" || kind == "rt") {
    if (have_p || normalized) fail_parse("tournament distances take no p= or norm flags");
    return TournamentSpec{kind == "rt"};
  }
  if (kind == "lp") {
    if (normalized) fail_parse("the simplex lp distance takes no norm flag");
    return SimplexLp{p};
  }
  if (kind.rfind("wass:", 0) == 0) {
    if (normalized) fail_parse("the Wasserstein distance takes no norm flag");
    if (p.is_inf()) fail_domain("the Wasserstein distance needs a finite exponent");
    return KantorovichSpec{parse_ground(kind.substr(5), m), p.p()};
  }
  return VotewiseSpec{parse_ground(kind, m), p, normalized};
}

// Grammar: dr(CONSENSUS,DISTANCE[,p=N|p=inf][,norm]) or a named alias.
// CONSENSUS: wunam | sunam | sunam:s | cond | genunam:file | nonconvex.
// DISTANCE: a ground metric name (votewise), t | rt (tournament margins),
// lp (simplex corner rule), or wass:GROUND (Wasserstein on the simplex).
RuleSpec build_rule(const std::string& text, int m) {
  std::string s = trim(text);
  if (s == "borda") s = "dr(wunam,kendall,p=1)";
  else if (s == "plurality") s = "dr(wunam,discrete,p=1)";
  else if (s == "kemeny") s = "dr(sunam,kendall,p=1)";
  else if (s == "modal") s = "dr(sunam,discrete,p=1)";
  else if (s == "copeland") s = "dr(cond,rt)";
  if (s.rfind("dr(", 0) != 0 || s.back() != ')')
    fail_parse("rule '" + text + "' is not dr(...) or a known alias "
               "(borda|plurality|kemeny|modal|copeland)");
  std::vector<std::string> toks = split(s.substr(3, s.size() - 4), ',');
  for (std::string& t : toks) t = trim(t);
  if (toks.empty() || toks[0].empty()) fail_parse("rule '" + text + "' has no consensus token");
  ConsensusSpec K = parse_consensus(toks[0], m);
  toks.erase(toks.begin());
  return RuleSpec{std::move(K), parse_distance(toks, m)};
}

void check_rule_candidates(const RuleSpec& R, const CandidateSet& C) {
  const auto fixed = R.consensus.fixed_candidates();
  if (!fixed) return;
  if (fixed->size() != C.size()) {
    fail_domain("input has " + std::to_string(C.size()) + " candidates but the consensus fixes " +
                std::to_string(fixed->size()));
  }
  if (*fixed != C) fail_domain("input candidate set does not match the consensus candidate set");
}

njson point_json(const SimplexPoint& x) { return njson::parse(format_point_json(x)); }

njson outcome_json(const RuleSpec& R, const CandidateSet& C, const RuleOutcome& out) {
  njson j;
  j["rule"] = R.name();
  njson w = njson::array();
  for (const SRanking& r : out.winners) w.push_back(format_sranking(C, r));
  j["winners"] = std::move(w);
  njson s = njson::object();
  for (const auto& [r, score] : out.scores) s[format_sranking(C, r)] = ext_str(score);
  j["scores"] = std::move(s);
  return j;
}

struct RuleInput {
  CandidateSet candidates;
  RuleSpec rule;
  RuleOutcome outcome;
};

RuleInput evaluate_rule(const std::string& rule_text, const std::string& profile_path,
                        const std::string& point_path) {
  if (profile_path.empty() == point_path.empty())
    fail_parse("pass exactly one of --profile or --point");
  if (!profile_path.empty()) {
    AnonymousProfile E = parse_profile_text(read_file(profile_path));
    RuleSpec R = build_rule(rule_text, E.candidates.size());
    check_rule_candidates(R, E.candidates);
    RuleOutcome out = dr_outcome(R, E);
    return {E.candidates, std::move(R), std::move(out)};
  }
  SimplexPoint x = parse_point_json(read_file(point_path));
  RuleSpec R = build_rule(rule_text, x.candidates.size());
  check_rule_candidates(R, x.candidates);
  RuleOutcome out = dr_outcome(R, x);
  return {x.candidates, std::move(R), std::move(out)};
}

Culture parse_culture(const std::string& text) {
  if (text == "ic") return Culture::ImpartialCulture;
  if (text == "uc" || text == "uniform") return Culture::UniformComposition;
  fail_parse("unknown culture '" + text + "' (expected ic or uc)");
}

// ---- verify suites ---------------------------------------------------

struct SuiteRow {
  std::string label;
  bool pass;
  long long cases;
  std::string detail;
};

std::vector<SuiteRow> run_identity_suite(int m, long long nmax) {
  struct Pair {
    OracleRule oracle;
    const char* rule;
  };
  const std::string bw = [m] {
    std::string t = "dr(wunam,wfootrule:";
    for (int i = 0; i < m; ++i) t += (i ? ";" : "") + std::to_string(m - 1 - i);
    return t + ",p=1)";
  }();
  const std::vector<Pair> pairs = {
      {OracleRule::Borda, "dr(wunam,kendall,p=1)"},
      {OracleRule::Borda, bw.c_str()},
      {OracleRule::Plurality, "dr(wunam,discrete,p=1)"},
      {OracleRule::Kemeny, "dr(sunam,kendall,p=1)"},
      {OracleRule::ModalRanking, "dr(sunam,discrete,p=1)"},
      {OracleRule::Copeland, "dr(cond,rt)"},
  };
  std::vector<SuiteRow> rows;
  for (const Pair& pr : pairs) {
    RuleSpec R = build_rule(pr.rule, m);
    OracleSpec oracle;
    oracle.rule = pr.oracle;
    IdentityReport rep = check_identity(R, oracle, m, nmax);
    rows.push_back({oracle.name() + " == " + R.name(), rep.equal, rep.cases_checked,
                    rep.equal ? "" : rep.detail});
  }
  return rows;
}

std::vector<SuiteRow> run_transport_suite(int m, long long nmax, int samples,
                                          std::uint64_t seed) {
  if (nmax > 5) fail_capacity("the bijection oracle handles n <= 5");
  std::vector<SuiteRow> rows;
  const std::vector<GroundMetric> grounds = {GroundMetric::discrete(), GroundMetric::kendall(),
                                             GroundMetric::footrule()};
  int stream = 0;
  for (const GroundMetric& g : grounds) {
    for (unsigned p : {1u, 2u}) {
      std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(stream++)));
      bool ok = true;
      std::string detail;
      for (int i = 0; i < samples && ok; ++i) {
        const long long n = 1 + static_cast<long long>(uniform_below(rng, static_cast<std::uint64_t>(nmax)));
        const SimplexPoint x = vote_distribution(sample_profile(m, n, Culture::UniformComposition, rng));
        const SimplexPoint y = vote_distribution(sample_profile(m, n, Culture::UniformComposition, rng));
        const Rat got = wasserstein(g, p, x, y, {true, false}).cost_pth_power;
        const Rat want = quotient_bruteforce(g, p, x, y, n);
        if (got != want) {
          ok = false;
          detail = "mismatch at sample " + std::to_string(i) + ": transport " + format_rat(got) +
                   ", bijection oracle " + format_rat(want);
        }
      }
      rows.push_back({"wasserstein == bijection quotient (" + g.key() + ", p=" +
                          std::to_string(p) + ")",
                      ok, samples, detail});
    }
  }
  return rows;
}

// ---- subcommand handlers ----------------------------------------------

struct CommonFlags {
  std::string emit = "json";
  int precision = 6;
};

int cmd_winners(const std::string& rule, const std::string& profile, const std::string& point) {
  const RuleInput in = evaluate_rule(rule, profile, point);
  std::cout << outcome_json(in.rule, in.candidates, in.outcome).dump(2) << "\n";
  return 0;
}

int cmd_score(const std::string& rule, const std::string& profile, const std::string& point,
              const std::string& outcome_text, const CommonFlags& fmt) {
  const RuleInput in = evaluate_rule(rule, profile, point);
  if (fmt.emit == "csv") {
    std::cout << "outcome,score\n";
    for (const auto& [r, score] : in.outcome.scores) {
      std::cout << format_sranking(in.candidates, r) << ","
                << (score.is_finite() ? rat_decimal(score.value(), fmt.precision) : "inf")
                << "\n";
    }
    return 0;
  }
  njson j = outcome_json(in.rule, in.candidates, in.outcome);
  if (!outcome_text.empty()) {
    const SRanking want = parse_sranking(in.candidates, outcome_text);
    for (const auto& [r, score] : in.outcome.scores) {
      if (r == want) {
        njson one;
        one["rule"] = in.rule.name();
        one["outcome"] = format_sranking(in.candidates, r);
        one["score"] = ext_str(score);
        std::cout << one.dump(2) << "\n";
        return 0;
      }
    }
    fail_domain("'" + outcome_text + "' is not an outcome of this rule");
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_wasserstein(const std::string& ground, const std::string& p_text, const std::string& x_path,
                    const std::string& y_path, bool coupling, const CommonFlags& fmt) {
  const SimplexPoint x = parse_point_json(read_file(x_path));
  const SimplexPoint y = parse_point_json(read_file(y_path));
  const GroundMetric g = parse_ground(ground, x.candidates.size());
  const PNorm p = parse_pnorm(p_text);
  if (p.is_inf()) fail_domain("the Wasserstein distance needs a finite exponent");
  TransportOptions opts;
  opts.allow_large_m = true;
  opts.want_coupling = coupling;
  const TransportResult res = wasserstein(g, p.p(), x, y, opts);
  if (fmt.emit == "csv") {
    std::cout << "ground,p,cost\n"
              << g.key() << "," << p.str() << "," << rat_decimal(res.cost_pth_power, fmt.precision)
              << "\n";
    return 0;
  }
  njson j;
  j["ground"] = g.key();
  j["p"] = res.p;
  j["cost"] = format_rat(res.cost_pth_power);  // p-th power convention
  if (coupling) {
    njson rows = njson::array();
    for (const auto& row : res.coupling) {
      njson r = njson::array();
      for (const Rat& v : row) r.push_back(format_rat(v));
      rows.push_back(std::move(r));
    }
    j["coupling"] = std::move(rows);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

njson hyperplane_json(const Hyperplane& h) {
  njson j;
  njson normal = njson::array();
  for (const Rat& a : h.normal) normal.push_back(format_rat(a));
  j["normal"] = std::move(normal);
  j["offset"] = format_rat(h.offset);
  return j;
}

int cmd_bisector(bool l1_mode, const std::string& x_path, const std::string& y_path,
                 const std::string& rule, int m, const std::string& pair,
                 const std::string& pair2, const std::string& norm_text) {
  if (l1_mode) {
    if (x_path.empty() || y_path.empty()) fail_parse("--l1 needs two point files");
    const SimplexPoint x = parse_point_json(read_file(x_path));
    const SimplexPoint y = parse_point_json(read_file(y_path));
    if (x.candidates.size() != y.candidates.size())
      fail_domain("points live on different simplices");
    const BisectorVerdict amb = large_bisector_l1(x.coords, y.coords);
    const SimplexBisectorVerdict sim = large_bisector_l1_simplex(x, y);
    njson j;
    j["mode"] = "l1-points";
    njson a;
    a["large"] = amb.large;
    a["degenerate"] = amb.degenerate;
    a["signs"] = amb.signs;
    if (amb.ball_center) {
      njson c = njson::array();
      for (const Rat& v : *amb.ball_center) c.push_back(format_rat(v));
      a["ball_center"] = std::move(c);
      a["ball_radius"] = format_rat(amb.ball_radius);
    }
    j["ambient"] = std::move(a);
    njson s;
    s["large"] = sim.large;
    s["degenerate"] = sim.degenerate;
    s["signs"] = sim.signs;
    if (sim.sample) s["sample"] = point_json(*sim.sample);
    j["simplex"] = std::move(s);
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (rule.empty() || pair.empty())
    fail_parse("hyperplane mode needs --rule and --pair (or use --l1 with two point files)");
  RuleSpec R = build_rule(rule, m);
  const auto* vw = std::get_if<VotewiseSpec>(&R.distance);
  if (!vw) fail_domain("hyperplane extraction applies to votewise rules");
  if (vw->p.is_inf()) fail_domain("hyperplane extraction needs a finite exponent");
  const CandidateSet C = R.consensus.fixed_candidates().value_or(CandidateSet::alphabet(m));
  const auto parse_pair = [&](const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) fail_parse("outcome pair must look like 'a,b'");
    return std::pair<SRanking, SRanking>{parse_sranking(C, trim(parts[0])),
                                         parse_sranking(C, trim(parts[1]))};
  };
  const auto [r1, r2] = parse_pair(pair);
  const Hyperplane h1 = score_difference_hyperplane(R.consensus, C, vw->ground, vw->p.p(), r1, r2);
  njson j;
  j["mode"] = "hyperplane";
  j["rule"] = R.name();
  njson order = njson::array();
  for (const Ranking& t : enumerate_rankings(C.size())) order.push_back(format_ranking(C, t));
  j["order"] = std::move(order);
  j["pair"] = njson::array({format_sranking(C, r1), format_sranking(C, r2)});
  j["hyperplane"] = hyperplane_json(h1);
  if (!pair2.empty()) {
    const auto [q1, q2] = parse_pair(pair2);
    const Hyperplane h2 =
        score_difference_hyperplane(R.consensus, C, vw->ground, vw->p.p(), q1, q2);
    j["pair2"] = njson::array({format_sranking(C, q1), format_sranking(C, q2)});
    j["hyperplane2"] = hyperplane_json(h2);
    if (norm_text != "l1" && norm_text != "l2" && norm_text != "linf")
      fail_parse("norm must be l1, l2 or linf");
    const PNorm norm =
        norm_text == "linf" ? PNorm::inf() : PNorm::finite(norm_text == "l2" ? 2 : 1);
    const HyperplaneBisector bis = bisector_of_hyperplanes(h1, h2, norm);
    njson bj;
    bj["norm"] = norm_text;
    if (!bis.plus_degenerate) bj["plus"] = hyperplane_json(bis.plus);
    if (!bis.minus_degenerate) bj["minus"] = hyperplane_json(bis.minus);
    j["bisector"] = std::move(bj);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_partition(const std::vector<long long>& items, const std::string& emit) {
  for (long long v : items)
    if (v < 0) fail_domain("partition items must be nonnegative");
  const PartitionResult res = partition_solve(items);
  if (emit == "json") {
    njson j;
    j["feasible"] = res.feasible;
    if (res.feasible) {
      njson a = njson::array(), b = njson::array();
      for (std::size_t i = 0; i < items.size(); ++i)
        (res.side[i] == 0 ? a : b).push_back(items[i]);
      j["subset"] = std::move(a);
      j["complement"] = std::move(b);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  if (!res.feasible) {
    std::cout << "none\n";
    return 0;
  }
  std::string a, b;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string& side = res.side[i] == 0 ? a : b;
    if (!side.empty()) side += ",";
    side += std::to_string(items[i]);
  }
  std::cout << "{" << a << "} vs {" << b << "}\n";
  return 0;
}

int cmd_verify(const std::string& suite, int m, long long nmax, int samples, std::uint64_t seed) {
  std::vector<SuiteRow> rows;
  bool known = false;
  if (suite == "identities" || suite == "all") {
    known = true;
    std::cout << "suite identities: m=" << m << ", n in [1," << nmax << "]\n";
    for (const SuiteRow& r : run_identity_suite(m, nmax)) rows.push_back(r);
  }
  if (suite == "transport" || suite == "all") {
    known = true;
    std::cout << "suite transport: m=" << m << ", n in [1," << std::min<long long>(nmax, 5)
              << "], " << samples << " pairs per cell\n";
    for (const SuiteRow& r : run_transport_suite(m, std::min<long long>(nmax, 5), samples, seed))
      rows.push_back(r);
  }
  if (!known) fail_parse("unknown suite '" + suite + "' (expected identities|transport|all)");
  bool all = true;
  for (const SuiteRow& r : rows) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.label << "  (" << r.cases << " cases)\n";
    if (!r.pass) {
      all = false;
      if (!r.detail.empty()) std::cout << "      " << r.detail << "\n";
    }
  }
  std::cout << "result: " << (all ? "PASS" : "FAIL") << "\n";
  return all ? 0 : 1;
}

int cmd_boundary(const std::string& rule, int m, long long n, long long trials,
                 std::uint64_t seed, const std::string& culture_text, int threads,
                 const CommonFlags& fmt) {
  RuleSpec R = build_rule(rule, m);
  if (const auto fixed = R.consensus.fixed_candidates(); fixed && fixed->size() != m)
    fail_domain("--m does not match the consensus candidate set");
  const Culture culture = parse_culture(culture_text);
  const BoundaryEstimate est = boundary_fraction(R, m, n, culture, trials, seed, threads);
  const std::string estimate = rat_decimal(est.fraction, fmt.precision);
  const std::string conf = double_decimal(est.conf_radius, fmt.precision);
  if (fmt.emit == "csv") {
    std::cout << "rule,m,n,culture,trials,ties,estimate,conf_radius\n"
              << R.name() << "," << m << "," << n << "," << culture_text << "," << est.trials
              << "," << est.ties << "," << estimate << "," << conf << "\n";
    return 0;
  }
  njson j;
  j["rule"] = R.name();
  j["m"] = m;
  j["n"] = n;
  j["culture"] = culture_text;
  j["trials"] = est.trials;
  j["ties"] = est.ties;
  j["fraction"] = format_rat(est.fraction);
  j["estimate"] = estimate;
  j["conf_radius"] = conf;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_diagnose(const std::string& consensus_text, const std::string& checks_text,
                 const DiagnosticsOptions& opts, const CommonFlags& fmt) {
  const ConsensusSpec K = parse_consensus(consensus_text, opts.m);
  std::vector<DiagCheck> checks;
  if (checks_text == "all") {
    checks = {DiagCheck::Neutrality, DiagCheck::Homogeneity, DiagCheck::Convexity,
              DiagCheck::Separation, DiagCheck::Consistency};
  } else {
    for (const std::string& part : split(checks_text, ',')) {
      const std::string name = trim(part);
      if (name == "neutrality") checks.push_back(DiagCheck::Neutrality);
      else if (name == "homogeneity") checks.push_back(DiagCheck::Homogeneity);
      else if (name == "convexity") checks.push_back(DiagCheck::Convexity);
      else if (name == "separation") checks.push_back(DiagCheck::Separation);
      else if (name == "consistency") checks.push_back(DiagCheck::Consistency);
      else fail_parse("unknown check '" + name + "'");
    }
  }
  const DiagnosticsReport rep = consensus_diagnostics(K, checks, opts);
  if (fmt.emit == "csv") {
    const CheckResult* sep = nullptr;
    for (const CheckResult& r : rep.results)
      if (r.check == DiagCheck::Separation) sep = &r;
    if (!sep) fail_domain("csv emission reports the separation schedule; add the separation check");
    std::cout << "denominator,min_separation\n";
    for (const auto& [d, v] : sep->separation_schedule)
      std::cout << d << "," << rat_decimal(v, fmt.precision) << "\n";
    return rep.all_pass() ? 0 : 1;
  }
  njson j;
  j["consensus"] = K.key();
  j["m"] = opts.m;
  njson arr = njson::array();
  for (const CheckResult& r : rep.results) {
    njson c;
    c["name"] = diag_check_name(r.check);
    c["pass"] = r.pass;
    c["detail"] = r.detail;
    if (!r.witness_points.empty()) {
      njson pts = njson::array();
      for (const SimplexPoint& x : r.witness_points) pts.push_back(point_json(x));
      c["witness_points"] = std::move(pts);
    }
    if (!r.separation_schedule.empty()) {
      njson sched = njson::array();
      for (const auto& [d, v] : r.separation_schedule)
        sched.push_back(njson::array({d, format_rat(v)}));
      c["schedule"] = std::move(sched);
    }
    arr.push_back(std::move(c));
  }
  j["checks"] = std::move(arr);
  j["all_pass"] = rep.all_pass();
  std::cout << j.dump(2) << "\n";
  return rep.all_pass() ? 0 : 1;
}

int cmd_gen(const std::string& culture_text, int m, long long n, std::uint64_t seed, int count) {
  const Culture culture = parse_culture(culture_text);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    if (count > 1) std::cout << "# profile " << (i + 1) << " of " << count << "\n";
    std::cout << format_profile_text(sample_profile(m, n, culture, rng));
    if (i + 1 < count) std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drvote: exact distance-rationalizable voting rules, simplex transport "
               "distances, bisector geometry and decisiveness diagnostics"};
  app.require_subcommand(1);

  std::string rule, profile, point, outcome, ground = "kendall", p_text = "1";
  std::string x_path, y_path, pair, pair2, norm_text = "l1";
  std::string suite = "identities", culture = "ic", consensus, checks = "all";
  std::string emit = "json", pemit = "text";
  int precision = 6;
  int m = 3, threads = 1, samples = 50, count = 1;
  long long n = 1, nmax = 5, trials = 1000;
  std::uint64_t seed = 1;
  bool l1_mode = false, coupling = false;
  std::vector<long long> items;

  const auto add_emit = [&](CLI::App* c) {
    c->add_option("--emit", emit, "Report format: json or csv")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--precision", precision, "Decimal digits for csv/estimates")
        ->check(CLI::Range(1, 50));
  };

  CLI::App* w = app.add_subcommand("winners", "Evaluate a rule on a profile or simplex point");
  w->add_option("--rule", rule, "Rule spec, e.g. dr(wunam,kendall,p=1) or borda")->required();
  w->add_option("--profile", profile, "Profile text file ('count: a>b>c' lines)");
  w->add_option("--point", point, "Simplex point JSON file");

  CLI::App* sc = app.add_subcommand("score", "Report rule scores (p-th power convention)");
  sc->add_option("--rule", rule)->required();
  sc->add_option("--profile", profile);
  sc->add_option("--point", point);
  sc->add_option("--outcome", outcome, "Restrict to one outcome, e.g. 'b' or 'a>b>c'");
  add_emit(sc);

  CLI::App* wa = app.add_subcommand("wasserstein", "Exact transport distance between two points");
  wa->add_option("--ground", ground, "discrete|hamming|kendall|footrule|borda-footrule|wfootrule:..|wkendall:..");
  wa->add_option("--p", p_text, "Exponent (finite integer >= 1)");
  wa->add_option("x", x_path, "First point JSON file")->required();
  wa->add_option("y", y_path, "Second point JSON file")->required();
  wa->add_flag("--coupling", coupling, "Include the optimal coupling matrix");
  add_emit(wa);

  CLI::App* bi = app.add_subcommand("bisector", "Bisector geometry: l1 point pairs or rule hyperplanes");
  bi->add_flag("--l1", l1_mode, "Decide whether the l1 bisector of two points is large");
  bi->add_option("x", x_path, "First point JSON file (with --l1)");
  bi->add_option("y", y_path, "Second point JSON file (with --l1)");
  bi->add_option("--rule", rule, "Votewise rule for hyperplane extraction");
  bi->add_option("--m", m, "Number of candidates for hyperplane mode");
  bi->add_option("--pair", pair, "Outcome pair 'r,r2' for the score-difference hyperplane");
  bi->add_option("--pair2", pair2, "Second outcome pair: also emit the hyperplane-pair bisector");
  bi->add_option("--norm", norm_text, "Norm for the hyperplane-pair bisector: l1|l2|linf");

  CLI::App* pa = app.add_subcommand("partition", "Equal-sum split of nonnegative integers");
  pa->add_option("items", items, "Integers to split")->required()->expected(-1);
  pa->add_option("--emit", pemit, "text (default) or json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* ve = app.add_subcommand("verify", "Built-in verification suites");
  ve->add_option("--suite", suite, "identities|transport|all");
  ve->add_option("--m", m, "Number of candidates");
  ve->add_option("--nmax", nmax, "Largest voter count");
  ve->add_option("--samples", samples, "Pairs per transport cell");
  ve->add_option("--seed", seed, "Sampling seed");

  CLI::App* bo = app.add_subcommand("boundary", "Monte Carlo tie-region mass of a rule");
  bo->add_option("--rule", rule)->required();
  bo->add_option("--m", m, "Number of candidates");
  bo->add_option("--n", n, "Number of voters")->required();
  bo->add_option("--trials", trials, "Sample count");
  bo->add_option("--seed", seed, "Master seed");
  bo->add_option("--culture", culture, "ic (impartial culture) or uc (uniform counts)");
  bo->add_option("--threads", threads, "Worker threads (estimate is thread-count invariant)");
  add_emit(bo);

  CLI::App* di = app.add_subcommand("diagnose", "Consensus property diagnostics");
  DiagnosticsOptions dopts;
  std::string threshold = "1/20";
  di->add_option("--consensus", consensus, "wunam|sunam|sunam:s|cond|genunam:file|nonconvex")
      ->required();
  di->add_option("--checks", checks, "Comma list of neutrality,homogeneity,convexity,separation,consistency or all");
  di->add_option("--m", dopts.m, "Number of candidates");
  di->add_option("--seed", dopts.seed, "Sampling seed");
  di->add_option("--samples", dopts.samples, "Samples per check");
  di->add_option("--nmax", dopts.n_max, "Largest voter count for profile probes");
  di->add_option("--denmax", dopts.denominator_max, "Separation schedule denominator cap");
  di->add_option("--threshold", threshold, "Separation pass threshold as p/q");
  add_emit(di);

  CLI::App* ge = app.add_subcommand("gen", "Sample profiles from a culture");
  ge->add_option("--culture", culture, "ic or uc");
  ge->add_option("--m", m, "Number of candidates")->required();
  ge->add_option("--n", n, "Number of voters")->required();
  ge->add_option("--seed", seed, "Sampling seed");
  ge->add_option("--count", count, "How many profiles to emit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (w->parsed()) return cmd_winners(rule, profile, point);
    if (sc->parsed()) return cmd_score(rule, profile, point, outcome, {emit, precision});
    if (wa->parsed()) return cmd_wasserstein(ground, p_text, x_path, y_path, coupling, {emit, precision});
    if (bi->parsed()) return cmd_bisector(l1_mode, x_path, y_path, rule, m, pair, pair2, norm_text);
    if (pa->parsed()) return cmd_partition(items, pemit);
    if (ve->parsed()) return cmd_verify(suite, m, nmax, samples, seed);
    if (bo->parsed()) return cmd_boundary(rule, m, n, trials, seed, culture, threads, {emit, precision});
    if (di->parsed()) {
      dopts.separation_threshold = parse_rat(threshold);
      return cmd_diagnose(consensus, checks, dopts, {emit, precision});
    }
    if (ge->parsed()) return cmd_gen(culture, m, n, seed, count);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Parse:
      case ErrorKind::Domain:
        return 2;
      case ErrorKind::Capacity:
        return 3;
      case ErrorKind::Internal:
        return 1;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
