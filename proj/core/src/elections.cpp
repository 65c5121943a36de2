#include "drvote/elections.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace drvote {

long long AnonymousProfile::n() const {
  long long total = 0;
  for (long long c : counts) total += c;
  return total;
}

AnonymousProfile make_anonymous_profile(CandidateSet C, std::vector<long long> counts) {
  const long long M = factorial(C.size());
  if (static_cast<long long>(counts.size()) != M)
    fail_domain("anonymous profile needs exactly m! counts");
  for (long long c : counts)
    if (c < 0) fail_domain("negative ballot count");
  return AnonymousProfile{std::move(C), std::move(counts)};
}

SimplexPoint make_simplex_point(CandidateSet C, std::vector<Rat> coords) {
  const long long M = factorial(C.size());
  if (static_cast<long long>(coords.size()) != M)
    fail_domain("simplex point needs exactly m! coordinates");
  Rat sum = 0;
  for (const Rat& c : coords) {
    if (c < 0) fail_domain("negative simplex coordinate");
    sum += c;
  }
  if (sum != 1) fail_domain("simplex coordinates must sum to 1, got " + format_rat(sum));
  return SimplexPoint{std::move(C), std::move(coords)};
}

AnonymousProfile vote_number_map(const Profile& E) {
  if (E.ballots.empty()) fail_domain("profile with no voters");
  std::vector<long long> counts(factorial(E.candidates.size()), 0);
  for (const Ranking& b : E.ballots) {
    if (b.size() != E.candidates.size()) fail_domain("ballot size does not match candidate set");
    ++counts[static_cast<std::size_t>(ranking_index(b))];
  }
  return AnonymousProfile{E.candidates, std::move(counts)};
}

SimplexPoint vote_distribution(const Profile& E) { return vote_distribution(vote_number_map(E)); }

SimplexPoint vote_distribution(const AnonymousProfile& E) {
  const long long n = E.n();
  if (n <= 0) fail_domain("vote distribution of an empty profile");
  std::vector<Rat> coords;
  coords.reserve(E.counts.size());
  for (long long c : E.counts) coords.push_back(make_rat(c, n));
  return SimplexPoint{E.candidates, std::move(coords)};
}

AnonymousProfile realize(const SimplexPoint& x, long long n) {
  if (n <= 0) fail_domain("realize needs a positive voter count");
  std::vector<long long> counts;
  counts.reserve(x.coords.size());
  for (const Rat& c : x.coords) {
    Rat scaled = c * rat_of(n);
    if (scaled.get_den() != 1)
      fail_domain("point is not realizable with n = " + std::to_string(n) +
                  ": coordinate " + format_rat(c));
    if (!scaled.get_num().fits_slong_p()) fail_capacity("realized count overflows");
    counts.push_back(scaled.get_num().get_si());
  }
  return AnonymousProfile{x.candidates, std::move(counts)};
}

Profile to_profile(const AnonymousProfile& E) {
  const auto& all = enumerate_rankings(E.candidates.size());
  std::vector<Ranking> ballots;
  for (std::size_t t = 0; t < E.counts.size(); ++t)
    for (long long k = 0; k < E.counts[t]; ++k) ballots.push_back(all[t]);
  if (ballots.empty()) fail_domain("profile with no voters");
  return Profile{E.candidates, std::move(ballots)};
}

TournamentMatrix tournament_matrix(const AnonymousProfile& E) {
  const int m = E.candidates.size();
  const auto& all = enumerate_rankings(m);
  std::vector<long long> entries(static_cast<std::size_t>(m) * m, 0);
  for (std::size_t t = 0; t < E.counts.size(); ++t) {
    if (E.counts[t] == 0) continue;
    const Ranking& r = all[t];
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const int hi = r.at(i), lo = r.at(j);
        entries[static_cast<std::size_t>(hi) * m + lo] += E.counts[t];
        entries[static_cast<std::size_t>(lo) * m + hi] -= E.counts[t];
      }
  }
  return TournamentMatrix{E.candidates, std::move(entries)};
}

TournamentMatrix tournament_matrix(const Profile& E) {
  return tournament_matrix(vote_number_map(E));
}

std::vector<int> reduced_tournament(const TournamentMatrix& T) {
  std::vector<int> signs;
  signs.reserve(T.entries.size());
  for (long long v : T.entries) signs.push_back(v > 0 ? 1 : (v < 0 ? -1 : 0));
  return signs;
}

std::optional<int> condorcet_winner(const AnonymousProfile& E) {
  const TournamentMatrix T = tournament_matrix(E);
  const int m = E.candidates.size();
  for (int c = 0; c < m; ++c) {
    bool wins_all = true;
    for (int b = 0; b < m && wins_all; ++b)
      if (b != c && T.at(c, b) <= 0) wins_all = false;
    if (wins_all) return c;
  }
  return std::nullopt;
}

Rat pairwise_fraction(const SimplexPoint& x, int a, int b) {
  const int m = x.candidates.size();
  if (a == b || a < 0 || b < 0 || a >= m || b >= m) fail_domain("bad candidate pair");
  const auto& all = enumerate_rankings(m);
  Rat f = 0;
  for (std::size_t t = 0; t < x.coords.size(); ++t)
    if (all[t].rank_of(a) < all[t].rank_of(b)) f += x.coords[t];
  return f;
}

std::optional<int> condorcet_winner(const SimplexPoint& x) {
  const int m = x.candidates.size();
  const Rat half = make_rat(1, 2);
  for (int c = 0; c < m; ++c) {
    bool wins_all = true;
    for (int b = 0; b < m && wins_all; ++b)
      if (b != c && pairwise_fraction(x, c, b) <= half) wins_all = false;
    if (wins_all) return c;
  }
  return std::nullopt;
}

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

AnonymousProfile parse_profile_text(const std::string& text) {
  // First pass: collect candidate names; the set is the sorted union.
  struct Line {
    long long count;
    std::string ranking_text;
    long long number;
  };
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  std::vector<std::string> names;
  long long lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) fail_parse(where + "profile line missing ':': '" + raw + "'");
    const std::string count_text = strip(line.substr(0, colon));
    const std::string ranking_text = strip(line.substr(colon + 1));
    long long count = 0;
    try {
      std::size_t used = 0;
      count = std::stoll(count_text, &used);
      if (used != count_text.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail_parse(where + "bad ballot count '" + count_text + "' (column 1)");
    }
    if (count < 0) fail_parse(where + "negative ballot count in '" + raw + "'");
    lines.push_back({count, ranking_text, lineno});
    std::string cur;
    for (char c : ranking_text + ">") {
      if (c == '>') {
        cur = strip(cur);
        if (!cur.empty() && std::find(names.begin(), names.end(), cur) == names.end())
          names.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
  }
  if (lines.empty()) fail_parse("profile text contains no ballot lines");
  std::sort(names.begin(), names.end());
  CandidateSet C(names);
  if (C.size() > kMaxEnumerationCandidates)
    fail_capacity("profile has more than " + std::to_string(kMaxEnumerationCandidates) +
                  " candidates");
  std::vector<long long> counts(factorial(C.size()), 0);
  for (const auto& entry : lines) {
    try {
      const Ranking r = parse_ranking(C, entry.ranking_text);
      counts[static_cast<std::size_t>(ranking_index(r))] += entry.count;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Parse) throw;
      fail_parse("line " + std::to_string(entry.number) + ": " + e.what());
    }
  }
  AnonymousProfile E{std::move(C), std::move(counts)};
  if (E.n() <= 0) fail_parse("profile text has zero voters");
  return E;
}

std::string format_profile_text(const AnonymousProfile& E) {
  const auto& all = enumerate_rankings(E.candidates.size());
  std::string out;
  for (std::size_t t = 0; t < E.counts.size(); ++t) {
    if (E.counts[t] == 0) continue;
    out += std::to_string(E.counts[t]) + ": " + format_ranking(E.candidates, all[t]) + "\n";
  }
  return out;
}

SimplexPoint parse_point_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail_parse(std::string("bad point JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("candidates") || !j.contains("coords"))
    fail_parse("point JSON needs \"candidates\" and \"coords\"");
  if (j.contains("order") && j["order"] != "lex")
    fail_parse("point JSON \"order\" must be \"lex\"");
  std::vector<std::string> names;
  for (const auto& c : j["candidates"]) {
    if (!c.is_string()) fail_parse("candidate names must be strings");
    names.push_back(c.get<std::string>());
  }
  CandidateSet C(names);
  if (C.size() > kMaxEnumerationCandidates) fail_capacity("point JSON has too many candidates");
  std::vector<Rat> coords;
  for (const auto& c : j["coords"]) {
    if (c.is_string())
      coords.push_back(parse_rat(c.get<std::string>()));
    else if (c.is_number_integer())
      coords.push_back(rat_of(c.get<long long>()));
    else
      fail_parse("coordinates must be rational strings like \"3/7\"");
  }
  return make_simplex_point(std::move(C), std::move(coords));
}

std::string format_point_json(const SimplexPoint& x) {
  nlohmann::json j;
  j["candidates"] = x.candidates.names();
  j["order"] = "lex";
  std::vector<std::string> coords;
  coords.reserve(x.coords.size());
  for (const Rat& c : x.coords) coords.push_back(format_rat(c));
  j["coords"] = coords;
  return j.dump();
}

}  // namespace drvote
