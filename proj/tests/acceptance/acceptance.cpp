// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/resource.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tcurator/error.hpp"
#include "tcurator/ingestion.hpp"
#include "tcurator/ops_crosslog.hpp"
#include "tcurator/ops_session.hpp"
#include "tcurator/persistence.hpp"
#include "tcurator/pipeline.hpp"
#include "tcurator/sparql/features.hpp"
#include "tcurator/sparql/parser.hpp"
#include "tcurator/trust_metrics.hpp"

using namespace tcurator;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

fs::path data(const std::string& rel) { return fs::path(TCURATOR_TEST_DATA) / rel; }

struct Scratch {
  Scratch() {
    path = fs::temp_directory_path() / ("tcurator-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path path;
};

std::string percent_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string clf_time(long seconds) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "12/Mar/2024:%02ld:%02ld:%02ld +0000", (seconds / 3600) % 24, (seconds / 60) % 60,
                seconds % 60);
  return buf;
}

std::string log_line(const std::string& ip, long seconds, const std::string& query, const std::string& agent) {
  return ip + " - - [" + clf_time(seconds) + "] \"GET /sparql?query=" + percent_encode(query) +
         "&format=json HTTP/1.1\" 200 512 \"-\" \"" + agent + "\"";
}

long peak_rss_kb() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return u.ru_maxrss;
}

RunStatistics without_durations(RunStatistics s) {
  for (auto& o : s.per_operator) o.duration = std::chrono::milliseconds(0);
  return s;
}

PipelineSpec fixture_spec() { return load_pipeline(data("fixture/pipeline.yaml")); }

// ---------------------------------------------------------------------------

void rate_formula() {
  const auto t0 = Clock::now();
  const auto r = rate_of_trust(139932, 6756);
  const auto shown = r.to_percent_string(2);
  const double ms = elapsed_ms(t0);
  const bool exact = r == Rational(133176, 139932);
  const double pct = std::stod(shown);
  const bool within = std::abs(pct - 95.16) <= 0.02 + 1e-9;
  report(exact && shown == "95.17" && within && ms < 1.0, "rate_of_trust formula",
         "133176/139932 -> " + shown + "% in " + std::to_string(ms) + " ms");
}

// Random two-log pipelines with random parameters; every stage outcome is
// checked against the ids the stage received.
void partition_conservation() {
  Scratch dir;
  std::mt19937_64 rng(2024);
  const std::vector<std::string> queries = {
      "SELECT ?b ?t WHERE { ?b rdf:type dbo:Book . ?b dbo:title ?t . ?b dbo:author ?a }",
      "SELECT ?p WHERE { ?p dbo:birthPlace ?c . ?c dbo:country ?k }",
      "SELECT ?p WHERE { ?p dbo:birthPlac ?c }",
      "SELCT ?f WHERE { ?f rdf:type dbo:Film }",
      "SELECT ?f WHERE { ?f dbo:director ?d . ?f dbo:starring ?s",
      "SELECT (COUNT(?x) AS ?n) WHERE { ?x rdf:type dbo:Lake } GROUP BY ?x",
      "SELECT * WHERE { ?a dbo:spouse ?b . ?b dbo:spouse ?c . ?c dbo:spouse ?a }",
      "SELECT * WHERE { ?a dbo:genre ?g . ?a dbo:bandMember ?m . ?m dbo:hometown ?h . ?h dbo:country ?c }",
      "ASK { ?s ?p ?o }",
      "SELECT ?x WHERE { ?x foaf:name \"Ada\" }",
      "this is not a query",
      "SELECT ?s WHERE { ?s dbo:subject ?o . ?o dbo:location ?l }",
      "CONSTRUCT { ?s ?p ?o } WHERE { ?s dbo:capital ?o }",
  };
  const std::vector<std::string> ips = {"192.0.2.11", "192.0.2.12", "198.18.0.5",  "198.19.4.4",
                                        "203.0.113.7", "10.0.0.1",   "192.0.2.200", "198.18.9.9"};
  const std::vector<std::string> agents = {"Mozilla/5.0 Firefox/118.0", "ExampleBot/1.0", "curl/8.0",
                                           "LinkSpider"};
  auto pick = [&](const auto& v) -> const auto& { return v[rng() % v.size()]; };
  auto subset = [&](const std::vector<std::string>& all) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& x : all) {
      if (rng() % 2) s.push_back(x);
    }
    return s;
  };
  auto write_log = [&](const fs::path& p, std::size_t n) {
    std::ofstream out(p);
    long t = static_cast<long>(rng() % 3600);
    for (std::size_t i = 0; i < n; ++i) {
      t += static_cast<long>(rng() % 240);
      out << log_line(pick(ips), t, pick(queries), pick(agents)) << "\n";
    }
  };

  constexpr int kRounds = 1000;
  std::map<OperatorKind, std::size_t> applications, violations;
  const auto t0 = Clock::now();
  for (int round = 0; round < kRounds; ++round) {
    write_log(dir.path / "primary.log", 5 + rng() % 40);
    write_log(dir.path / "donor.log", rng() % 12);
    PipelineSpec spec;
    spec.run_id = "r" + std::to_string(round);
    spec.inputs = {{dir.path / "primary.log", LogFormat{}, "A", "primary"},
                   {dir.path / "donor.log", LogFormat{}, "B", "donor"}};
    spec.kb.blacklist = data("fixture/blacklist.txt");
    spec.kb.orgmap = data("fixture/orgmap.csv");
    spec.kb.topics = data("fixture/topics.csv");
    spec.kb.vocabulary = data("fixture/vocab.txt");
    auto theta = [&](bool allow_zero) {
      const double x = static_cast<double>(rng() % 1001) / 1000.0;
      return (!allow_zero && x == 0.0) ? 0.5 : x;
    };
    for (auto op : all_operators()) {
      nlohmann::json p = nlohmann::json::object();
      switch (op) {
        case OperatorKind::RobotCleaner:
          p = {{"rate_threshold", 1.0 + static_cast<double>(rng() % 100)},
               {"min_session_length", 1 + rng() % 12},
               {"regularity_cv", static_cast<double>(rng() % 50) / 100.0}};
          break;
        case OperatorKind::BusinessAcademic: p = {{"keep", subset({"Business", "Academic", "Unknown"})}}; break;
        case OperatorKind::Deduplicator: p = {{"mode", rng() % 2 ? "Canonical" : "Exact"}}; break;
        case OperatorKind::SemanticCorrector: p = {{"max_distance", 1 + rng() % 3}}; break;
        case OperatorKind::TopicClustering:
          if (rng() % 2) p = {{"keep", subset({"publications", "people", "geography", "cinema", "music", "Unknown"})}};
          break;
        case OperatorKind::SchemaRanking: p = {{"theta", theta(true)}}; break;
        case OperatorKind::ComplexityFilter: {
          const auto lo = rng() % 3;
          p = {{"shapes", subset({"Point", "Star", "Chain", "Tree", "Cycle", "Disconnected"})}, {"min_depth", lo}};
          if (rng() % 2) p["max_depth"] = lo + rng() % 3;
          break;
        }
        case OperatorKind::ExpertiseFilter: p = {{"keep", subset({"Beginner", "Intermediate", "Expert"})}}; break;
        case OperatorKind::AnalyticSelector: p = {{"keep", pick(std::vector<std::string>{"Analytic", "Standard", "Both"})}}; break;
        case OperatorKind::LogsJoin:
        case OperatorKind::LogsEnrichment: p = {{"theta", theta(false)}}; break;
        default: break;
      }
      spec.operators.push_back({op, p});
    }

    std::set<std::string> previous;
    bool first = true;
    RunObserver obs;
    obs.stage_finished = [&](std::size_t, const OperatorOutcome& o) {
      ++applications[o.op];
      std::set<std::string> all;
      for (const auto& id : o.trusted) all.insert(id.value);
      for (const auto& id : o.untrusted) all.insert(id.value);
      bool ok = o.trusted.size() + o.untrusted.size() == o.input_count && all.size() == o.input_count;
      if (!first) {
        if (o.op == OperatorKind::LogsEnrichment) {
          ok = ok && std::includes(all.begin(), all.end(), previous.begin(), previous.end()) &&
               all.size() - previous.size() == o.external_input;
        } else {
          ok = ok && all == previous;
        }
      }
      if (!ok) ++violations[o.op];
      previous.clear();
      for (const auto& id : o.trusted) previous.insert(id.value);
      first = false;
    };
    try {
      run_pipeline(spec, obs);
    } catch (const std::exception& e) {
      std::cerr << "round " << round << ": " << e.what() << "\n";
      ++violations[OperatorKind::Extract];
    }
  }
  std::size_t total_violations = 0;
  bool every = true;
  for (auto op : all_operators()) {
    total_violations += violations[op];
    every = every && applications[op] >= static_cast<std::size_t>(kRounds);
  }
  report(every && total_violations == 0, "partition conservation",
         std::to_string(kRounds) + " randomized applications x 16 operators, " + std::to_string(total_violations) +
             " violations in " + std::to_string(static_cast<long>(elapsed_ms(t0))) + " ms");
}

void shape_oracle() {
  constexpr int kCases = 20000;
  oracle::BgpGenerator gen(1337);
  std::vector<std::vector<sparql::TriplePattern>> cases;
  cases.reserve(kCases);
  for (int i = 0; i < kCases; ++i) cases.push_back(gen.next(6));
  std::size_t disagree = 0;
  std::map<sparql::QueryShape, std::size_t> seen;
  const auto t0 = Clock::now();
  for (const auto& ps : cases) {
    const auto shape = sparql::classify_shape(ps);
    const auto depth = sparql::join_depth(ps);
    ++seen[shape];
    if (shape != oracle::shape(ps) || depth != oracle::depth(ps)) ++disagree;
  }
  const double ms = elapsed_ms(t0);
  report(disagree == 0 && seen.size() == 6 && ms < 30000.0, "shape/depth oracle",
         std::to_string(kCases) + " BGPs, " + std::to_string(disagree) + " disagreements, " +
             std::to_string(seen.size()) + " shape classes, " + std::to_string(static_cast<long>(ms)) + " ms");
}

void canonical_dedup() {
  constexpr int kOriginals = 500;
  oracle::BgpGenerator gen(77);
  std::mt19937_64 rng(77);
  std::vector<CuratedQuery> qs;
  std::size_t line = 0;
  auto emit = [&](const std::vector<sparql::TriplePattern>& ps, const std::string& stem) {
    auto vars = oracle::variable_list(ps);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < vars.size(); ++k) names.push_back(stem + std::to_string(k));
    std::shuffle(names.begin(), names.end(), rng);
    std::map<std::string, std::string> m;
    for (std::size_t k = 0; k < vars.size(); ++k) m[vars[k]] = names[k];
    std::vector<std::size_t> order(ps.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    CuratedQuery q;
    q.text = oracle::render_select(ps, m, order);
    q.source_log = "gen";
    q.entry.ip = *IpAddress::parse("192.0.2.1");
    q.entry.timestamp.utc = Instant(std::chrono::milliseconds(1700000000000LL + static_cast<long long>(line) * 1000));
    q.entry.line_number = ++line;
    q.id = make_query_id("gen", line, q.text);
    qs.push_back(std::move(q));
  };
  std::vector<std::vector<sparql::TriplePattern>> originals;
  for (int i = 0; i < kOriginals; ++i) {
    auto ps = gen.next(5);
    sparql::TriplePattern marker;
    marker.subject = ps[0].subject;
    marker.predicate = {sparql::TermKind::Iri, "http://example.org/original", "", true, 0, 0};
    marker.object = {sparql::TermKind::Literal, "\"o" + std::to_string(i) + "\"", "", true, 0, 0};
    ps.push_back(marker);
    originals.push_back(ps);
  }
  for (const auto& ps : originals) emit(ps, "a");
  for (const auto& ps : originals) emit(ps, "b");
  std::shuffle(qs.begin(), qs.end(), rng);
  const auto out = deduplicate(std::move(qs), DedupMode::Canonical);
  std::set<std::string> markers;
  for (const auto& q : out.trusted) {
    std::smatch m;
    if (std::regex_search(q.text, m, std::regex("\"o([0-9]+)\""))) markers.insert(m[1]);
  }
  report(out.trusted.size() == kOriginals && markers.size() == kOriginals, "canonical deduplication",
         std::to_string(2 * kOriginals) + " queries -> " + std::to_string(out.trusted.size()) + " trusted, " +
             std::to_string(markers.size()) + " distinct originals");
}

void robot_sessions() {
  constexpr int kSessions = 1000;
  std::mt19937_64 rng(99);
  RobotConfig cfg;
  auto build = [&](bool regular, std::uint32_t block) {
    std::vector<CuratedQuery> qs;
    for (int s = 0; s < kSessions; ++s) {
      const auto ip = "10." + std::to_string(block) + "." + std::to_string(s / 250) + "." + std::to_string(s % 250);
      const std::size_t n = regular ? 10 + rng() % 41 : 20 + rng() % 31;
      const double step = 2.0 + static_cast<double>(rng() % 119);
      std::exponential_distribution<double> gap(1.0 / (6.0 + static_cast<double>(rng() % 115)));
      double t = static_cast<double>(rng() % 100000);
      for (std::size_t k = 0; k < n; ++k) {
        CuratedQuery q;
        q.text = "SELECT * WHERE { ?s ?p ?o }";
        q.source_log = "synthetic";
        q.entry.ip = *IpAddress::parse(ip);
        q.entry.timestamp.utc = Instant(std::chrono::milliseconds(static_cast<long long>(t * 1000.0)));
        q.entry.user_agent = "Mozilla/5.0";
        q.entry.line_number = qs.size() + 1;
        q.id = make_query_id("synthetic", q.entry.line_number, ip);
        qs.push_back(std::move(q));
        t += regular ? step : gap(rng);
      }
    }
    return qs;
  };
  auto flagged_sessions = [&](const std::vector<CuratedQuery>& qs) {
    const auto sessions = sessionize(qs, cfg.gap);
    std::set<IpAddress> flagged;
    for (const auto& s : sessions) {
      if (is_robotic(s, qs, cfg)) flagged.insert(s.ip);
    }
    return flagged.size();
  };
  const auto regular = build(true, 1);
  const auto human = build(false, 2);
  const auto robots = flagged_sessions(regular);
  const auto humans = flagged_sessions(human);
  const auto cleaned = clean_robots(regular, cfg);
  report(robots == kSessions && humans == 0 && cleaned.trusted.empty(), "robot cleaner",
         std::to_string(robots) + "/" + std::to_string(kSessions) + " constant-interval sessions flagged, " +
             std::to_string(humans) + "/" + std::to_string(kSessions) + " Poisson sessions flagged");
}

void determinism() {
  const std::set<std::pair<std::string, std::size_t>> expected = {
      {"primary", 1},  {"primary", 6},  {"primary", 9},  {"primary", 11}, {"primary", 12}, {"primary", 15},
      {"primary", 16}, {"primary", 17}, {"primary", 18}, {"primary", 19}, {"primary", 20}, {"donor", 1}};
  try {
    const auto a = run_pipeline(fixture_spec());
    const auto b = run_pipeline(fixture_spec());
    std::set<std::string> ia, ib;
    std::set<std::pair<std::string, std::size_t>> survivors;
    for (const auto& q : a.trusted) {
      ia.insert(q.id.value);
      survivors.emplace(q.entry.source_log, q.entry.line_number);
    }
    for (const auto& q : b.trusted) ib.insert(q.id.value);
    const bool same = ia == ib && without_durations(a.stats) == without_durations(b.stats);
    report(same && survivors == expected, "pipeline determinism",
           std::to_string(a.trusted.size()) + " survivors, runs identical: " + (same ? "yes" : "no") +
               ", survivor set matches: " + (survivors == expected ? "yes" : "no"));
  } catch (const std::exception& e) {
    report(false, "pipeline determinism", e.what());
  }
}

void ordering() {
  std::vector<std::string> names;
  for (auto op : all_operators()) names.insert(names.begin(), std::string(to_string(op)));
  std::shuffle(names.begin(), names.end(), std::mt19937_64(5));
  const std::vector<std::string> expected = {
      "Extract",          "FormatConvert",  "RobotCleaner",      "BusinessAcademic", "VulnerableEliminator",
      "Deduplicator",     "SyntacticCorrector", "SemanticCorrector", "TopicClustering", "SchemaRanking",
      "ComplexityFilter", "ExpertiseFilter", "AnalyticSelector", "LogsJoin",         "LogsEnrichment",
      "Load"};
  std::vector<std::string> got;
  for (const auto& c : order_operators(names, 2)) got.emplace_back(to_string(c.kind));
  const auto pair = order_operators(std::vector<std::string>{"Deduplicator", "RobotCleaner"}, 1);
  const bool pair_ok = pair.size() == 2 && pair[0].kind == OperatorKind::RobotCleaner &&
                       pair[1].kind == OperatorKind::Deduplicator;
  report(got == expected && pair_ok, "canonical operator ordering",
         std::to_string(got.size()) + " stages; {Deduplicator, RobotCleaner} -> " +
             std::string(to_string(pair[0].kind)) + " first");
}

void similarity_oracle() {
  std::mt19937_64 rng(31);
  auto random_query = [&] {
    std::string body;
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < n; ++k) {
      body += "?v" + std::to_string(rng() % 3) + " <http://e/p" + std::to_string(rng() % 6) + "> ";
      switch (rng() % 3) {
        case 0: body += "<http://e/o" + std::to_string(rng() % 6) + ">"; break;
        case 1: body += "\"lit" + std::to_string(rng() % 6) + "\""; break;
        default: body += "?w" + std::to_string(rng() % 3); break;
      }
      body += " . ";
    }
    return "SELECT * WHERE { " + body + "}";
  };
  auto terms = [](const sparql::ParsedQuery& q) {
    std::set<std::string> out;
    for (const auto& tp : q.triple_patterns) {
      for (const auto& t : {tp.subject, tp.predicate, tp.object}) {
        if (t.kind == sparql::TermKind::Iri) out.insert("<" + t.value + ">");
        if (t.kind == sparql::TermKind::Literal) out.insert(t.value);
      }
    }
    return out;
  };
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    auto a = std::get<sparql::ParsedQuery>(sparql::parse_query(random_query()));
    auto b = std::get<sparql::ParsedQuery>(sparql::parse_query(random_query()));
    if (query_similarity(a, b) != oracle::jaccard(terms(a), terms(b))) ++mismatches;
  }
  report(mismatches == 0, "similarity oracle", "1000 pairs, " + std::to_string(mismatches) + " mismatches");
}

void persistence_roundtrip() {
  Scratch dir;
  std::mt19937_64 rng(8080);
  const std::vector<std::string> texts = {"SELECT * WHERE { ?s ?p ?o }", "ASK { <http://a> ?p \"x\\\"y\" }",
                                          "SELECT ?n WHERE {\n  ?s foaf:name ?n\n}", "é ünïcode 🙂 \t tab",
                                          "garbage { with } braces"};
  std::vector<CuratedQuery> qs;
  for (int i = 0; i < 1000; ++i) {
    CuratedQuery q;
    q.text = texts[rng() % texts.size()] + " #" + std::to_string(i);
    q.source_log = rng() % 2 ? "primary" : "donor";
    q.entry.ip = rng() % 2 ? *IpAddress::parse("192.0.2." + std::to_string(rng() % 256))
                           : *IpAddress::parse("2001:db8::" + std::to_string(rng() % 9000));
    q.entry.timestamp.utc = Instant(std::chrono::milliseconds(1600000000000LL + static_cast<long long>(rng() % 100000000000LL)));
    q.entry.timestamp.offset_minutes = static_cast<int>(rng() % 25) * 60 - 720;
    q.entry.method = rng() % 2 ? "GET" : "POST";
    q.entry.raw_request = "/sparql?query=" + percent_encode(q.text);
    q.entry.status = 200 + static_cast<int>(rng() % 300);
    if (rng() % 3) q.entry.user_agent = "agent/" + std::to_string(rng() % 10);
    q.entry.source_log = q.source_log;
    q.entry.line_number = static_cast<std::size_t>(i + 1);
    q.id = make_query_id(q.source_log, q.entry.line_number, q.text);
    const auto n = rng() % 6;
    for (std::size_t k = 0; k < n; ++k) {
      const auto op = all_operators()[rng() % kOperatorCount];
      TrustAnnotation a;
      a.op = op;
      a.applied_at = Instant(std::chrono::milliseconds(1700000000000LL + static_cast<long long>(rng() % 1000000)));
      const auto labels = declared_labels(op);
      if (rng() % 2 || (labels && labels->empty())) {
        a.degree = TrustDegree::boolean(rng() % 2);
      } else if (labels) {
        a.degree = TrustDegree::categorical(std::string((*labels)[rng() % labels->size()]));
      } else {
        a.degree = TrustDegree::categorical("Label:" + std::to_string(rng() % 50));
      }
      q.annotations.push_back(a);
    }
    qs.push_back(std::move(q));
  }
  auto same = [](const CuratedQuery& a, const CuratedQuery& b) {
    return a.id == b.id && a.text == b.text && a.source_log == b.source_log && a.annotations == b.annotations &&
           a.entry == b.entry;
  };
  auto count_equal = [&](const std::vector<CuratedQuery>& back) {
    std::size_t eq = 0;
    for (std::size_t i = 0; i < qs.size() && i < back.size(); ++i) eq += same(qs[i], back[i]);
    return back.size() == qs.size() ? eq : 0;
  };
  std::size_t store_eq = 0, file_eq = 0;
  try {
    load_to_store(qs, dir.path / "store.db", "roundtrip");
    Store store(dir.path / "store.db");
    store_eq = count_equal(store.read_queries("roundtrip"));
    load_to_file(qs, dir.path / "out.ndjson", FileFormat::NdjsonLike);
    file_eq = count_equal(read_ndjson(dir.path / "out.ndjson"));
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
  }
  report(store_eq == qs.size() && file_eq == qs.size(), "persistence round-trip",
         "store " + std::to_string(store_eq) + "/1000, ndjson " + std::to_string(file_eq) + "/1000 equal");
}

void stats_golden() {
  Scratch dir;
  try {
    auto spec = fixture_spec();
    spec.output.stats = dir.path / "stats.yaml";
    run_pipeline(spec);
    std::ifstream a(dir.path / "stats.yaml");
    std::ifstream b(data("fixture/stats.golden.yaml"));
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    const auto mask = [](const std::string& s) {
      return std::regex_replace(s, std::regex("duration_ms: [0-9]+"), "duration_ms: 0");
    };
    const bool text_eq = mask(sa.str()) == mask(sb.str());
    const bool struct_eq = without_durations(stats_from_yaml(sa.str())) == without_durations(stats_from_yaml(sb.str()));
    report(text_eq && struct_eq, "stats yaml golden",
           std::string("structure ") + (struct_eq ? "equal" : "differs") + ", text " + (text_eq ? "equal" : "differs"));
  } catch (const std::exception& e) {
    report(false, "stats yaml golden", e.what());
  }
}

void throughput() {
  constexpr std::size_t kLines = 1000000;
  Scratch dir;
  const auto path = dir.path / "big.log";
  {
    std::ofstream out(path);
    const std::string tail = "&format=json HTTP/1.1\" 200 512 \"-\" \"Mozilla/5.0\"\n";
    for (std::size_t i = 0; i < kLines; ++i) {
      const auto q = "SELECT ?s WHERE { ?s <http://e/p" + std::to_string(i % 97) + "> " + std::to_string(i) + " }";
      out << "192.0.2." << (i % 250) << " - - [" << clf_time(static_cast<long>(i % 86400)) << "] \"GET /sparql?query="
          << percent_encode(q) << tail;
    }
  }
  const auto bytes = fs::file_size(path);
  const long rss_before = peak_rss_kb();
  const auto t0 = Clock::now();
  std::size_t emitted = 0, errors = 0, lines = 0;
  {
    LogFormat format;
    LogReader reader(path, format, "big");
    QueryExtractor extractor(format);
    while (auto item = reader.next()) {
      if (const auto* e = std::get_if<RawLogEntry>(&*item)) {
        if (extractor.offer(*e)) ++emitted;
      } else {
        ++errors;
      }
    }
    lines = reader.lines_read();
  }
  const double sec = elapsed_ms(t0) / 1000.0;
  const long growth_kb = peak_rss_kb() - rss_before;
  const bool bounded = growth_kb < 64 * 1024;
  report(lines == kLines && emitted == kLines && errors == 0 && sec < 120.0 && bounded, "ingestion throughput",
         std::to_string(lines) + " lines (" + std::to_string(bytes / (1024 * 1024)) + " MiB) in " +
             std::to_string(sec) + " s, peak RSS growth " + std::to_string(growth_kb / 1024) + " MiB");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {
      throughput,   rate_formula, partition_conservation, shape_oracle,          canonical_dedup,
      robot_sessions, determinism, ordering,             similarity_oracle,     persistence_roundtrip,
      stats_golden,
  };
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      report(false, "criterion", std::string("unexpected exception: ") + e.what());
    }
  }
  return failures == 0 ? 0 : 1;
}
