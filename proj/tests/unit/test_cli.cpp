#include <doctest.h>

#include "build.hpp"
#include "specflow/experiments.hpp"
#include "specflow/serialize.hpp"

using namespace specflow;
using namespace tb;

TEST_CASE("key=value config") {
    ExperimentConfig c = parse_config(
        "# toast settings\n"
        "d = 1\n"
        "alpha=1.5\n"
        "gamma = 30   # comment after a value\n"
        "K = 7/8\n"
        "window = -100:100\n"
        "seed = 42\n");
    CHECK(c.d == 1);
    CHECK(c.alpha == 1.5);
    CHECK(c.gamma == 30);
    CHECK(*c.K == Coord::ratio(7, 8));
    CHECK(*c.window == box1(-100, 100));
    CHECK(c.seed == 42);
    CHECK(c.levels == 1);
}

TEST_CASE("JSON config") {
    ExperimentConfig c = parse_config(R"({"d": 2, "alpha": 2.0, "window": "0,0:600,600", "K": null})");
    CHECK(c.d == 2);
    CHECK(c.alpha == 2.0);
    CHECK(*c.window == box2(0, 0, 600, 600));
    CHECK_FALSE(c.K.has_value());
    // The echo parses back to the same settings.
    ExperimentConfig again = parse_config(to_json(c).dump());
    CHECK(to_json(again) == to_json(c));
}

TEST_CASE("config errors name the field") {
    auto field_of = [](const std::string& text) {
        try {
            parse_config(text).validate();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("none");
    };
    CHECK(field_of("alpha = 0.9") == "alpha");
    CHECK(field_of("d = 4") == "d");
    CHECK(field_of("gamma = 9") == "gamma");
    CHECK(field_of("levels = -1") == "levels");
    CHECK(field_of("colour = red") == "colour");
    CHECK(field_of("window = 1,2") == "window");
    CHECK(field_of("d = 1\nwindow = 0,0:5,5") == "window");
    CHECK(field_of("alpha = fast") == "alpha");
    CHECK(field_of("{\"alpha\": \"x\"}") == "alpha");
    CHECK(field_of("just words") == "line 1");
    CHECK(field_of("d = 3") == "none");
}

TEST_CASE("region json round trip") {
    Region a(2, {box2(0, 0, 10, 4), box2(0, 0, 4, 10.5)});
    CHECK(region_from_json(to_json(a)) == a);
    CHECK(box_from_json(to_json(box1(-0.125, 3))) == box1(-0.125, 3));
}

TEST_CASE("report schema") {
    Report r;
    r.command = "toast";
    CheckResult ok("a");
    ok.samples = 3;
    CheckResult bad("b");
    bad.fail("broken");
    r.add(ok);
    r.add(bad);
    auto j = report_json(r, nlohmann::json::object(), {"x.svg"});
    CHECK(j["schema"] == kReportSchema);
    CHECK(j["status"] == "fail");
    CHECK(j["checks"][0]["status"] == "pass");
    CHECK(j["checks"][1]["failures"][0] == "broken");
    CHECK(j["artifacts"][0] == "x.svg");
    CHECK_FALSE(j.contains("timing"));
    CHECK(report_json(r, {}, {}, 1.5).contains("timing"));
}

TEST_CASE("katok command, seed 7") {
    ExperimentConfig c;
    c.d = 1;
    c.seed = 7;
    ExperimentResult res = run_command("katok", c);
    for (const auto& ch : res.report.checks) CHECK_MESSAGE(ch.pass, ch.name);
    CHECK(res.report.all_pass());
}

TEST_CASE("runs repeat exactly") {
    ExperimentConfig c;
    c.d = 1;
    c.seed = 3;
    c.samples = 200;
    for (const std::string cmd : {"toast", "suspend", "katok"}) {
        auto a = run_command(cmd, c, "csv"), b = run_command(cmd, c, "csv");
        CHECK(dump_report(report_json(a.report, to_json(c), {})) == dump_report(report_json(b.report, to_json(c), {})));
        REQUIRE(a.artifacts.size() == b.artifacts.size());
        for (std::size_t i = 0; i < a.artifacts.size(); ++i) CHECK(a.artifacts[i].content == b.artifacts[i].content);
    }
}

TEST_CASE("command dispatch") {
    ExperimentConfig c;
    c.regions = 3;
    c.pairs = 500;
    auto lip = run_command("lipschitz", c);
    CHECK(lip.report.all_pass());
    REQUIRE(lip.artifacts.size() == 1);
    CHECK(lip.artifacts[0].name == "quotients.csv");
    CHECK(lip.artifacts[0].content.rfind("x,y,quotient\n", 0) == 0);
    c.d = 1;
    auto svg = run_command("toast", c, "svg");
    REQUIRE(svg.artifacts.size() == 1);
    CHECK(svg.artifacts[0].content.rfind("<svg", 0) == 0);
    CHECK_THROWS_AS(run_command("nope", c), ConfigError);
    CHECK_THROWS_AS(run_command("toast", c, "xml"), ConfigError);
    c.d = 2;
    CHECK_THROWS_AS(run_command("suspend", c), ConfigError);
}
