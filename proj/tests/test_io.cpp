#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "sqhbt/errors.hpp"
#include "sqhbt/io/config.hpp"
#include "sqhbt/io/presets.hpp"
#include "sqhbt/io/report.hpp"

using namespace sqhbt;
using namespace sqhbt::io;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string field_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const InvalidParameter& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("round trip is byte-stable") {
        RunConfig c;
        c.command = Command::extremum;
        c.state = {0.01, pi, 0.01};
        c.detection = {0.5, 1e-5};
        c.pipeline = Pipeline::click;
        c.orders = {2, 4};
        c.axes = {Axis{Param::gamma, 1e-9, 1e-2, 8, Spacing::log}};
        c.extremum.order = 3;
        c.extremum.mode = ExtremumMode::max;
        c.mc.fock = 2;
        c.mc.seed = 0xdeadbeefcafeULL;
        c.figure.points = 17;
        c.out = "result.json";
        c.format = Format::json;
        const std::string text = dump_config(c);
        CHECK(text.back() == '\n');
        const RunConfig back = parse_config(text);
        CHECK(dump_config(back) == text);
        CHECK(back.state.theta == pi);
        CHECK(back.detection.gamma == 1e-5);
        CHECK(back.mc.seed == 0xdeadbeefcafeULL);
        CHECK(back.mc.fock == std::optional<std::size_t>(2));
        REQUIRE(back.axes.size() == 1);
        CHECK(back.axes[0].spacing == Spacing::log);
    }

    TEST_CASE("missing sections keep their defaults") {
        const RunConfig c = parse_config(R"({"schema": "sqhbt.run/1", "state": {"r": 0.2}})");
        CHECK(c.state.r == 0.2);
        CHECK(c.state.alpha == RunConfig{}.state.alpha);
        CHECK(c.detection.eta == 1.0);
    }

    TEST_CASE("unknown keys are rejected by name") {
        CHECK(field_of(R"({"schema": "sqhbt.run/1", "colour": 1})") == "colour");
        CHECK(field_of(R"({"schema": "sqhbt.run/1", "state": {"beta": 1}})") == "state.beta");
        CHECK(field_of(R"({"schema": "sqhbt.run/1", "axes": [{"param": "r", "step": 1}]})") == "axes[0].step");
        CHECK(field_of(R"({"schema": "sqhbt.run/1", "mc": {"trials": -5}})") == "mc.trials");
        CHECK(field_of(R"({"schema": "sqhbt.run/1", "state": {"r": "big"}})") == "state.r");
        CHECK(field_of(R"({"schema": "sqhbt.run/1", "pipeline": "quantum"})") == "pipeline");
        CHECK(field_of(R"({"state": {}})") == "schema");
        CHECK(field_of("{not json") == "config");
    }

    TEST_CASE("validation names the offending field") {
        RunConfig c;
        c.detection.eta = 1.5;
        CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("eta"), InvalidParameter);
        c = RunConfig{};
        c.command = Command::sweep;
        CHECK_THROWS_AS(validate(c), InvalidParameter);
        c.axes = {parse_axis("theta:0:2pi:9")};
        CHECK_NOTHROW(validate(c));
        c.command = Command::figure;
        c.figure.preset = "fig9";
        CHECK_THROWS_AS(validate(c), InvalidParameter);
        c = RunConfig{};
        c.tol = 0.1;
        CHECK_THROWS_AS(validate(c), InvalidParameter);
    }

    TEST_CASE("axis and number syntax") {
        const Axis a = parse_axis("gamma:1e-9:1e-2:8:log");
        CHECK(a.param == Param::gamma);
        CHECK(a.min == 1e-9);
        CHECK(a.points == 8);
        CHECK(a.spacing == Spacing::log);
        const Axis t = parse_axis("theta:0:2pi:5");
        CHECK(t.max == 2.0 * pi);
        CHECK(t.spacing == Spacing::linear);
        CHECK(parse_number("pi", "x") == pi);
        CHECK(parse_number("0.5pi", "x") == 0.5 * pi);
        CHECK_THROWS_AS(parse_number("1e", "x"), InvalidParameter);
        CHECK_THROWS_AS(parse_axis("theta:0:1"), InvalidParameter);
        CHECK_THROWS_AS(parse_axis("theta:0:1:x"), InvalidParameter);
        CHECK_THROWS_AS(parse_axis("phi:0:1:3"), InvalidParameter);
    }
}

TEST_SUITE("csv") {
    TEST_CASE("numbers carry twelve significant digits") {
        CHECK(format_number(1.0) == "1");
        CHECK(format_number(pi) == "3.14159265359");
        CHECK(format_number(1e-5) == "1e-05");
        CHECK(format_number(std::nan("")).empty());
    }

    TEST_CASE("sweep schema: axis columns then fixed columns") {
        SweepSpec s;
        s.axes = {Axis{Param::r, 0.0, 0.01, 2, Spacing::linear}, Axis{Param::alpha, 0.0, 0.5, 2, Spacing::linear}};
        s.orders = {2, 4};
        std::ostringstream out;
        write_sweep_csv(out, sweep(s));
        const std::string text = out.str();
        CHECK(text.find('\r') == std::string::npos);
        const auto rows = lines(text);
        REQUIRE(rows.size() == 5);
        CHECK(rows[0] == "r,alpha,g2,g3,g4,mean_clicks,pipeline,diagnostics");
        // Vacuum row: no values, diagnostic quoted only if needed.
        CHECK(rows[1].rfind("0,0,,,,,ideal,", 0) == 0);
        CHECK(rows[1].size() > std::string("0,0,,,,,ideal,").size());
        // Coherent row: g3 was not requested.
        CHECK(rows[2] == "0,0.5,1,,1,0.25,ideal,");
    }

    TEST_CASE("extremum map schema") {
        ExtremumSpec base;
        base.state = {0.001, 0.0, 0.0};
        base.pipeline = Pipeline::click;
        base.grid = 20;
        const auto map = extremum_map({Axis{Param::eta, 0.5, 1.0, 2, Spacing::linear}}, base);
        std::ostringstream out;
        write_map_csv(out, map, ExtremumMode::min);
        const auto rows = lines(out.str());
        REQUIRE(rows.size() == 3);
        CHECK(rows[0] == "eta,order,g_min,alpha_at_min,bracket_width,pipeline,diagnostics");
        CHECK(rows[1].rfind("0.5,2,", 0) == 0);
    }
}

TEST_SUITE("reports") {
    TEST_CASE("point report at the feasible anti-bunching point") {
        RunConfig c;
        c.state = {0.001, 0.0, 0.032};
        c.detection = {0.5, 1e-5};
        const PointReport rep = compute_point(c);
        REQUIRE(rep.click.value);
        CHECK(rep.click.value->g2 == doctest::Approx(0.042).scale(0).epsilon(0.02));
        CHECK(rep.squeezing_db == doctest::Approx(0.0087).scale(0).epsilon(0.01));
        CHECK(rep.source_tail < 1e-12);
        std::ostringstream csv;
        write_point_csv(csv, rep);
        const auto rows = lines(csv.str());
        REQUIRE(rows.size() == 4);
        CHECK(rows[3].find(",click,") != std::string::npos);
    }

    TEST_CASE("vacuum point keeps going and explains itself") {
        RunConfig c;
        c.state = {0.0, 0.0, 0.0};
        const PointReport rep = compute_point(c);
        CHECK_FALSE(rep.ideal.value);
        CHECK_FALSE(rep.click.value);
        CHECK_FALSE(rep.click.diagnostic.empty());
    }
}

TEST_SUITE("presets") {
    TEST_CASE("every preset builds valid datasets") {
        for (const std::string& id : preset_ids()) {
            CAPTURE(id);
            const Preset p = make_preset(id);
            CHECK_FALSE(p.datasets.empty());
            CHECK_FALSE(p.defaults.empty());
            for (const Dataset& d : p.datasets) {
                CHECK_NOTHROW(validate(d.sweep));
                if (d.extremum) CHECK_NOTHROW(validate(*d.extremum));
            }
        }
        CHECK_THROWS_AS(make_preset("fig7"), InvalidParameter);
    }

    TEST_CASE("fig5 curves follow the stated amplitudes") {
        const Preset p = make_preset("fig5");
        REQUIRE(p.datasets.size() == 6);
        for (const Dataset& d : p.datasets) {
            CHECK(d.sweep.state.theta == pi);
            CHECK(d.sweep.axes[0].param == Param::r);
            const double a = d.sweep.state.alpha;
            CHECK((a == 0.01 || a == 0.1 || a == 1.0));
            if (d.sweep.pipeline == Pipeline::click) {
                CHECK(d.sweep.detection.eta == 0.5);
                CHECK(d.sweep.detection.gamma == 1e-5);
            }
        }
    }

    TEST_CASE("file names carry the preset and a parameter hash") {
        Preset p = make_preset("fig6");
        const std::string a = dataset_filename(p, p.datasets[0], "csv");
        CHECK(a.rfind("fig6_g2_gamma0_", 0) == 0);
        CHECK(a.size() == std::string("fig6_g2_gamma0_").size() + 16 + 4);
        Preset q = make_preset("fig6", 11);
        CHECK(dataset_filename(q, q.datasets[0], "csv") != a);
        CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    }

    TEST_CASE("axis overrides replace matching preset axes") {
        const Preset p = make_preset("fig2map", 3, {Axis{Param::r, 0.0, 0.0, 2, Spacing::linear}});
        const auto table = sweep(p.datasets[0].sweep);
        REQUIRE(table.rows.size() == 6);
        for (const auto& row : table.rows) {
            REQUIRE(row.value);
            CHECK(row.value->g2 == doctest::Approx(1.0).scale(0));
            CHECK(row.value->g4 == doctest::Approx(1.0).scale(0));
        }
    }
}
