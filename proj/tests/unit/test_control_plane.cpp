#include <sys/wait.h>

#include <regex>
#include <thread>

#include "doctest.h"
#include "helpers.hpp"
#include "httplib.h"
#include "tcurator/control_plane.hpp"
#include "tcurator/persistence.hpp"
#include "tcurator/pipeline.hpp"
#include "tcurator/trust_metrics.hpp"

using namespace tcurator;
using nlohmann::json;
using testing::error_of;

namespace {

std::string fixture_yaml(const std::string& run_id) {
  auto spec = load_pipeline(testing::data("fixture/pipeline.yaml"));
  spec.run_id = run_id;
  return pipeline_to_yaml(spec);
}

json masked(json stats) {
  for (auto& op : stats["operators"]) op["duration_ms"] = 0;
  return stats;
}

int run_cli(const std::string& args, const std::filesystem::path& out) {
  const std::string cmd = std::string(TCURATOR_CLI) + " " + args + " > " + out.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

struct Server {
  explicit Server(const std::filesystem::path& db) : runs(db), server(runs) {
    port = server.bind_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Server() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }

  RunManager runs;
  ApiServer server;
  int port = -1;
  std::thread thread;
};

json body_of(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

}  // namespace

TEST_CASE("addresses") {
  CHECK(parse_address("0.0.0.0:9000") == std::pair<std::string, int>{"0.0.0.0", 9000});
  CHECK(parse_address(":8081") == std::pair<std::string, int>{"127.0.0.1", 8081});
  CHECK(parse_address("8082") == std::pair<std::string, int>{"127.0.0.1", 8082});
  CHECK(error_of([] { parse_address("host:notaport"); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([] { parse_address("host:70000"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("api without transport") {
  testing::TempDir dir;
  RunManager runs(dir / "api.db");
  Api api(runs);
  CHECK(api.operators().body.size() == kOperatorCount);
  auto created = api.create_pipeline(fixture_yaml("direct"));
  CHECK(created.status == 201);
  CHECK(created.body["run_id"] == "direct");
  CHECK(created.body["status"] == "Pending");
  CHECK(api.create_pipeline(fixture_yaml("direct")).status == 409);
  CHECK(api.result("direct", std::nullopt, std::nullopt).status == 409);
  CHECK(api.sample("direct", "Deduplicator", std::nullopt).status == 409);
  CHECK(api.start_run("direct").status == 202);
  auto done = runs.wait("direct");
  CHECK(done->status == RunStatus::Done);
  CHECK(api.run_status("direct").body["display"] == "Done");
  CHECK(api.run_status("direct").body["final_trusted"] == 12);
  CHECK(api.sample("direct", "Deduplicator", std::string("x")).status == 400);
  CHECK(api.result("direct", std::string("-1"), std::nullopt).status == 400);
  CHECK(api.start_run("missing").status == 404);

  auto bad = api.create_pipeline("run_id: x\ninputs: [{path: /no/such.log}]\noperators: [ExpertiseFilter]\n");
  CHECK(bad.status == 400);
  CHECK(bad.body["error"] == "MissingDependency");
  CHECK(api.create_pipeline("run_id: [").status == 400);
  CHECK(api.create_pipeline("{\"run_id\": \"j\", \"inputs\": [{\"path\": \"/tmp/x.log\"}], \"operators\": [\"Load\"]}")
            .status == 201);
}

TEST_CASE("failed runs report the error") {
  testing::TempDir dir;
  RunManager runs(dir / "fail.db");
  Api api(runs);
  REQUIRE(api.create_pipeline("run_id: f\ninputs: [{path: /no/such.log}]\noperators: [Load]\n").status == 201);
  REQUIRE(api.start_run("f").status == 202);
  auto v = runs.wait("f");
  CHECK(v->status == RunStatus::Failed);
  auto body = api.run_status("f").body;
  CHECK(body["status"] == "Failed");
  CHECK(body["error"].get<std::string>().find("/no/such.log") != std::string::npos);
}

TEST_CASE("http surfaces") {
  testing::TempDir dir;
  Server srv(dir / "http.db");
  auto cli = srv.client();

  auto ops = cli.Get("/operators");
  REQUIRE(ops);
  CHECK(ops->status == 200);
  CHECK(ops->get_header_value("Access-Control-Allow-Origin") == "*");
  auto reg = json::parse(ops->body);
  REQUIRE(reg.size() == kOperatorCount);
  CHECK(reg[5]["name"] == "Deduplicator");

  auto bad = cli.Post("/pipelines", "run_id: x\ninputs: [{path: /a.log}]\noperators: [ExpertiseFilter]\n",
                      "application/yaml");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(body_of(bad)["error"] == "MissingDependency");

  auto created = cli.Post("/pipelines", fixture_yaml("fixture"), "application/yaml");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(body_of(created)["order"].size() == kOperatorCount);

  auto started = cli.Post("/pipelines/fixture/run");
  REQUIRE(started);
  CHECK(started->status == 202);
  auto again = cli.Post("/pipelines/fixture/run");
  REQUIRE(again);
  CHECK(again->status == 409);
  CHECK(body_of(again)["error"] == "AlreadyStarted");
  CHECK(cli.Post("/pipelines/nobody/run")->status == 404);

  srv.runs.wait("fixture");
  auto status = body_of(cli.Get("/runs/fixture"));
  CHECK(status["status"] == "Done");
  CHECK(status["completed_stages"] == kOperatorCount);
  CHECK(status["total_stages"] == kOperatorCount);
  CHECK(cli.Get("/runs/nobody")->status == 404);

  auto stats = body_of(cli.Get("/runs/fixture/stats"));
  auto golden = stats_to_json(load_stats(testing::data("fixture/stats.golden.yaml")));
  CHECK(masked(stats) == masked(golden));

  auto sample = cli.Get("/runs/fixture/operators/RobotCleaner/sample?n=2");
  REQUIRE(sample);
  CHECK(sample->status == 200);
  auto sj = json::parse(sample->body);
  CHECK(sj["trusted"].size() == 2);
  CHECK(sj["untrusted"].size() == 2);
  CHECK(sj["trusted_count"] == 15);
  CHECK(sj["untrusted_count"] == 5);
  auto capped = body_of(cli.Get("/runs/fixture/operators/RobotCleaner/sample?n=100000"));
  CHECK(capped["n"] == kMaxSample);
  CHECK(capped["untrusted"].size() == 5);
  auto dflt = body_of(cli.Get("/runs/fixture/operators/RobotCleaner/sample"));
  CHECK(dflt["n"] == 10);
  CHECK(dflt["trusted"].size() == 10);
  CHECK(cli.Get("/runs/fixture/operators/Sorter/sample")->status == 404);

  auto page = body_of(cli.Get("/runs/fixture/result?limit=5&offset=10"));
  CHECK(page["total"] == 12);
  CHECK(page["queries"].size() == 2);
  auto first = body_of(cli.Get("/runs/fixture/result"));
  CHECK(first["limit"] == 100);
  CHECK(first["queries"].size() == 12);
  CHECK(first["queries"][0].contains("annotations"));
  CHECK(cli.Get("/runs/nobody/result")->status == 404);

  auto pre = cli.Options("/pipelines");
  REQUIRE(pre);
  CHECK(pre->get_header_value("Access-Control-Allow-Origin") == "*");
}

TEST_CASE("cli") {
  testing::TempDir dir;
  const auto cfg = testing::data("fixture/pipeline.yaml").string();

  CHECK(run_cli("run --config " + cfg + " --dry-run", dir / "dry.txt") == 0);
  const auto dry = testing::read_file(dir / "dry.txt");
  CHECK(count_lines(dry) == kOperatorCount);
  CHECK(dry.rfind("Extract", 0) == 0);

  CHECK(run_cli("run --input /no/such/file.log --operators Load", dir / "missing.txt") == 2);
  CHECK(testing::read_file(dir / "missing.txt").find("/no/such/file.log") != std::string::npos);
  CHECK(run_cli("run --input " + testing::data("fixture/primary.log").string() + " --operators ExpertiseFilter",
                dir / "dep.txt") == 1);
  CHECK(run_cli("run --input " + testing::data("fixture/primary.log").string() + " --operators Sorter",
                dir / "unk.txt") == 1);
  CHECK(run_cli("run --config /no/such/pipeline.yaml", dir / "cfg.txt") == 1);

  const auto stats = dir / "stats.yaml";
  const auto out = dir / "out.ndjson";
  CHECK(run_cli("run --config " + cfg + " --stats-out " + stats.string() + " --out " + out.string() + " --db " +
                    (dir / "cli.db").string(),
                dir / "run.txt") == 0);
  const auto mask = [](const std::string& s) {
    return std::regex_replace(s, std::regex("duration_ms: [0-9]+"), "duration_ms: 0");
  };
  CHECK(mask(testing::read_file(stats)) == testing::read_file(testing::data("fixture/stats.golden.yaml")));
  CHECK(read_ndjson(out).size() == 12);

  CHECK(run_cli("resume --db " + (dir / "cli.db").string() + " --run-id fixture --from SchemaRanking",
                dir / "resume.txt") == 0);
  CHECK(run_cli("resume --db " + (dir / "cli.db").string() + " --run-id nobody", dir / "noresume.txt") == 3);

  CHECK(run_cli("operators", dir / "ops.txt") == 0);
  CHECK(json::parse(testing::read_file(dir / "ops.txt")).size() == kOperatorCount);
}
