#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "tcurator/ops_crosslog.hpp"
#include "tcurator/ops_session.hpp"

using namespace tcurator;
using namespace std::chrono_literals;
using testing::error_of;
using testing::make_query;
using testing::parsed;

namespace {

std::vector<CuratedQuery> timed(const std::string& ip, const std::vector<double>& seconds,
                                const std::string& text = "SELECT * WHERE { ?s ?p ?o }",
                                std::optional<std::string> agent = std::nullopt) {
  std::vector<CuratedQuery> out;
  for (double s : seconds) out.push_back(make_query(text, ip, s, agent));
  return out;
}

std::vector<double> regular(std::size_t n, double step, double start = 0) {
  std::vector<double> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back(start + step * static_cast<double>(i));
  return t;
}

// Sessions as sets of member indices, computed by grouping per IP and
// cutting at every gap above the threshold.
std::set<std::set<std::size_t>> oracle_sessions(const std::vector<CuratedQuery>& qs, double gap_seconds) {
  std::map<std::string, std::vector<std::size_t>> by_ip;
  for (std::size_t i = 0; i < qs.size(); ++i) by_ip[qs[i].entry.ip.to_string()].push_back(i);
  std::set<std::set<std::size_t>> out;
  for (auto& [ip, idx] : by_ip) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](auto a, auto b) { return qs[a].entry.timestamp.utc < qs[b].entry.timestamp.utc; });
    std::set<std::size_t> cur;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k > 0) {
        const double d =
            std::chrono::duration<double>(qs[idx[k]].entry.timestamp.utc - qs[idx[k - 1]].entry.timestamp.utc)
                .count();
        if (d > gap_seconds) {
          out.insert(cur);
          cur.clear();
        }
      }
      cur.insert(idx[k]);
    }
    out.insert(cur);
  }
  return out;
}

}  // namespace

TEST_CASE("sessions split at gaps above the threshold") {
  auto qs = timed("192.0.2.1", {0, 600, 3000});
  auto s = sessionize(qs, 30min);
  REQUIRE(s.size() == 2);
  CHECK(s[0].members == std::vector<std::size_t>{0, 1});
  CHECK(s[1].members == std::vector<std::size_t>{2});
  CHECK(s[0].start == testing::at_seconds(0));
  CHECK(s[0].end == testing::at_seconds(600));
  CHECK(sessionize(qs, 39min).size() == 2);
  CHECK(sessionize(qs, 40min).size() == 1);
  CHECK(error_of([&] { sessionize(qs, 0ms); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("sessionize matches the grouping oracle") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    std::vector<CuratedQuery> qs;
    const int n = std::uniform_int_distribution<int>(1, 60)(rng);
    for (int i = 0; i < n; ++i) {
      const auto ip = "10.0.0." + std::to_string(rng() % 4);
      qs.push_back(make_query("q", ip, static_cast<double>(rng() % 20000)));
    }
    auto sessions = sessionize(qs, 10min);
    std::set<std::set<std::size_t>> got;
    std::size_t covered = 0;
    for (const auto& s : sessions) {
      got.insert({s.members.begin(), s.members.end()});
      covered += s.members.size();
    }
    CHECK(covered == qs.size());
    CHECK(got == oracle_sessions(qs, 600));
  }
}

TEST_CASE("traffic statistics") {
  auto qs = timed("192.0.2.1", regular(11, 6));
  auto s = sessionize(qs);
  REQUIRE(s.size() == 1);
  auto t = session_traffic(s[0], qs);
  CHECK(t.rate_per_minute == doctest::Approx(10.0));
  CHECK(t.cv == doctest::Approx(0.0));
  auto burst = timed("192.0.2.2", {5, 5, 5});
  auto bt = session_traffic(sessionize(burst)[0], burst);
  CHECK(std::isinf(bt.rate_per_minute));
  auto uneven = timed("192.0.2.3", {0, 10, 40});
  CHECK(session_traffic(sessionize(uneven)[0], uneven).cv == doctest::Approx(0.5));
}

TEST_CASE("robot rules") {
  RobotConfig cfg;
  SUBCASE("agent pattern flags the whole session") {
    auto qs = timed("192.0.2.1", {0, 100}, "q");
    qs[1].entry.user_agent = "Mozilla/5.0 (compatible; ExampleBot/2.1)";
    auto out = clean_robots(qs, cfg);
    CHECK(out.trusted.empty());
    CHECK(out.untrusted.size() == 2);
    CHECK(out.untrusted[0].label_from(OperatorKind::RobotCleaner) == "Robot");
  }
  SUBCASE("rate above the threshold") {
    auto qs = timed("192.0.2.1", regular(20, 0.5));
    for (std::size_t i = 0; i < qs.size(); i += 2) qs[i].entry.timestamp.utc += 200ms;
    CHECK(clean_robots(qs, cfg).trusted.empty());
  }
  SUBCASE("perfectly regular traffic") {
    auto qs = timed("192.0.2.1", regular(12, 30));
    CHECK(clean_robots(qs, cfg).trusted.empty());
  }
  SUBCASE("short sessions are only judged by agent") {
    auto qs = timed("192.0.2.1", regular(9, 1));
    auto out = clean_robots(qs, cfg);
    CHECK(out.trusted.size() == 9);
    CHECK(out.trusted[0].label_from(OperatorKind::RobotCleaner) == "Human");
  }
  SUBCASE("irregular human traffic is kept") {
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> gap(1.0 / 90.0);
    std::vector<double> t{0};
    for (int i = 1; i < 25; ++i) t.push_back(t.back() + gap(rng));
    auto qs = timed("192.0.2.1", t);
    auto traffic = session_traffic(sessionize(qs)[0], qs);
    REQUIRE(traffic.cv > cfg.regularity_cv);
    CHECK(clean_robots(qs, cfg).trusted.size() == qs.size());
  }
  CHECK(agent_matches(std::string("My-CRAWLER"), cfg.agent_patterns));
  CHECK_FALSE(agent_matches(std::nullopt, cfg.agent_patterns));
  CHECK_FALSE(agent_matches(std::string("Mozilla/5.0"), cfg.agent_patterns));
}

TEST_CASE("expertise levels at the score boundaries") {
  const std::string deep = "SELECT * WHERE { ?a <http://p> ?b . ?b <http://p> ?c . ?c <http://p> ?d . ?d <http://p> ?e }";
  const std::string agg = "SELECT (COUNT(?s) AS ?n) WHERE { ?s <http://p> ?o }";
  const std::string plain = "SELECT * WHERE { ?s <http://p> ?o }";
  auto session_from = [](std::vector<std::string> texts) {
    std::vector<CuratedQuery> qs;
    double t = 0;
    for (const auto& x : texts) qs.push_back(parsed(make_query(x, "192.0.2.9", t += 10)));
    return qs;
  };
  auto level = [](const std::vector<CuratedQuery>& qs) {
    auto s = sessionize(qs);
    REQUIRE(s.size() == 1);
    return infer_expertise(s[0], qs);
  };
  CHECK(level(session_from({deep, plain})) == ExpertiseLevel::Expert);
  CHECK(level(session_from({agg, plain})) == ExpertiseLevel::Intermediate);
  CHECK(level(session_from({plain, plain})) == ExpertiseLevel::Beginner);
  CHECK(level(session_from({deep, plain, plain})) == ExpertiseLevel::Intermediate);
  CHECK(level(session_from({deep, agg, plain})) == ExpertiseLevel::Expert);
  CHECK(level(session_from({agg, "SELECT * WHERE {"})) == ExpertiseLevel::Beginner);

  auto qs = session_from({plain, plain});
  auto more = session_from({deep});
  for (auto& q : more) q.entry.ip = *IpAddress::parse("192.0.2.10");
  qs.insert(qs.end(), more.begin(), more.end());
  auto out = filter_expertise(qs, {ExpertiseLevel::Expert});
  REQUIRE(out.trusted.size() == 1);
  CHECK(out.trusted[0].label_from(OperatorKind::ExpertiseFilter) == "Expert");
  CHECK(out.untrusted[0].label_from(OperatorKind::ExpertiseFilter) == "Beginner");
}

TEST_CASE("deduplication keeps the earliest copy") {
  std::vector<CuratedQuery> qs = {
      parsed(make_query("SELECT ?x WHERE { ?x <http://p> ?y . ?y <http://q> 1 }", "192.0.2.1", 50)),
      parsed(make_query("SELECT ?a WHERE { ?b <http://q> 1 . ?a <http://p> ?b }", "192.0.2.1", 10)),
      parsed(make_query("SELECT ?x WHERE { ?x <http://p> ?y . ?y <http://q> 1 }", "192.0.2.2", 60)),
      make_query("not sparql", "192.0.2.1", 70),
      make_query("not sparql", "192.0.2.1", 80),
  };
  auto canon = deduplicate(qs);
  REQUIRE(canon.trusted.size() == 2);
  CHECK(canon.trusted[0].id == qs[1].id);
  CHECK(canon.trusted[1].id == qs[3].id);
  auto exact = deduplicate(qs, DedupMode::Exact);
  CHECK(exact.trusted.size() == 3);
  CHECK(parse_dedup_mode("Exact") == DedupMode::Exact);
  CHECK_FALSE(parse_dedup_mode("fuzzy"));
}

TEST_CASE("deduplication agrees with the equivalence oracle") {
  oracle::BgpGenerator gen(21);
  std::mt19937_64 rng(21);
  std::vector<std::vector<sparql::TriplePattern>> bgps;
  std::vector<CuratedQuery> qs;
  for (int i = 0; i < 120; ++i) {
    auto ps = (i > 0 && rng() % 3 == 0) ? bgps[rng() % bgps.size()] : gen.next(4);
    auto vars = oracle::variable_list(ps);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < vars.size(); ++k) names.push_back("n" + std::to_string(k));
    std::shuffle(names.begin(), names.end(), rng);
    std::map<std::string, std::string> m;
    for (std::size_t k = 0; k < vars.size(); ++k) m[vars[k]] = names[k];
    std::vector<std::size_t> order(ps.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    qs.push_back(parsed(make_query(oracle::render_select(ps, m, order), "192.0.2.1", i)));
    bgps.push_back(std::move(ps));
  }
  std::vector<bool> expect(qs.size(), true);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    for (std::size_t j = 0; j < i && expect[i]; ++j) {
      if (expect[j] && oracle::equivalent_bgp(bgps[i], bgps[j])) expect[i] = false;
    }
  }
  auto out = deduplicate(qs);
  std::set<QueryId> kept;
  for (const auto& q : out.trusted) kept.insert(q.id);
  for (std::size_t i = 0; i < qs.size(); ++i) CHECK(kept.contains(qs[i].id) == expect[i]);
}

TEST_CASE("topics by majority vote") {
  TopicReferenceBase base;
  base.add("http://dbpedia.org/ontology/Film", "Movies");
  base.add("http://dbpedia.org/ontology/director", "Movies");
  base.add("http://dbpedia.org/ontology/Book", "Literature");
  std::vector<CuratedQuery> qs = {
      parsed(make_query("SELECT * WHERE { ?f a dbo:Film ; dbo:director ?d . ?b a dbo:Book }")),
      parsed(make_query("SELECT * WHERE { ?b a dbo:Book }")),
      parsed(make_query("SELECT * WHERE { ?s ?p ?o }")),
      make_query("broken {"),
  };
  auto topics = cluster_topics(qs, base);
  CHECK(topics.at(qs[0].id) == "Movies");
  CHECK(topics.at(qs[1].id) == "Literature");
  CHECK(topics.at(qs[2].id) == kUnknownTopic);
  CHECK(topics.at(qs[3].id) == kUnknownTopic);
  auto out = filter_topics(qs, topics, {"Movies", "Literature"});
  CHECK(out.trusted.size() == 2);
  CHECK(out.trusted[0].label_from(OperatorKind::TopicClustering) == "Movies");
  CHECK(error_of([&] { filter_topics(qs, {}, {"Movies"}); }) == ErrorCode::InvalidArgument);

  testing::TempDir dir;
  testing::write_file(dir / "t.csv", "iri,topic\nhttp://e/a,A\nhttp://e/b,B\n");
  auto loaded = TopicReferenceBase::load(dir / "t.csv");
  CHECK(loaded.topics == std::set<std::string>{"A", "B"});
  CHECK(error_of([&] { TopicReferenceBase::load(dir / "none.csv"); }) == ErrorCode::FileNotReadable);
}

TEST_CASE("schema ranking drops queries similar to a more informative one") {
  std::vector<CuratedQuery> qs = {
      parsed(make_query("SELECT * WHERE { ?s <http://a> <http://x> . ?s <http://b> ?o }")),
      parsed(make_query("SELECT * WHERE { ?s <http://a> <http://x> . ?s <http://b> ?o . ?o <http://c> 1 }")),
      parsed(make_query("SELECT * WHERE { ?s <http://z> ?o }")),
      parsed(make_query("SELECT * WHERE { ?s ?p ?o }")),
  };
  CHECK(informativeness(*qs[1].parsed()) == 8);
  auto out = rank_schema(qs, 0.5);
  REQUIRE(out.trusted.size() == 3);
  CHECK(out.trusted[0].id == qs[1].id);
  CHECK(out.trusted[1].id == qs[2].id);
  REQUIRE(out.untrusted.size() == 1);
  CHECK(out.untrusted[0].id == qs[0].id);
  CHECK(out.untrusted[0].label_from(OperatorKind::SchemaRanking) == "Redundant");
  CHECK(out.trusted[2].label_from(OperatorKind::SchemaRanking) == "Informative");
  CHECK(rank_schema(qs, 1.0).trusted.size() == 4);
  CHECK(rank_schema(qs, 0.0).trusted.size() == 1);
  CHECK(error_of([&] { rank_schema(qs, 1.5); }) == ErrorCode::InvalidThreshold);
  CHECK(error_of([&] { rank_schema(qs, -0.1); }) == ErrorCode::InvalidThreshold);
}

TEST_CASE("schema ranking matches the all-pairs oracle") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 20; ++round) {
    std::vector<CuratedQuery> qs;
    for (int i = 0; i < 40; ++i) {
      std::string body;
      const int n = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < n; ++k) {
        body += "?s" + std::to_string(k) + " <http://e/p" + std::to_string(rng() % 4) + "> <http://e/o" +
                std::to_string(rng() % 4) + "> . ";
      }
      qs.push_back(parsed(make_query("SELECT * WHERE { " + body + "}")));
    }
    const double theta = 0.3 + 0.1 * static_cast<double>(round % 6);
    std::vector<std::size_t> order(qs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return informativeness(*qs[a].parsed()) > informativeness(*qs[b].parsed());
    });
    std::vector<std::size_t> accepted;
    std::set<QueryId> expect;
    for (auto i : order) {
      const auto ti = term_set(*qs[i].parsed());
      bool red = false;
      for (auto j : accepted) red = red || jaccard(ti, term_set(*qs[j].parsed())) >= theta;
      if (!red) {
        accepted.push_back(i);
        expect.insert(qs[i].id);
      }
    }
    auto out = rank_schema(qs, theta);
    std::set<QueryId> got;
    for (const auto& q : out.trusted) got.insert(q.id);
    CHECK(got == expect);
  }
}
