#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using sqhbt::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Fresh scratch directory under the system temp dir.
fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("sqhbt_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("exit codes") {
    TEST_CASE("success") {
        const auto r = invoke({"point", "--r", "0", "--alpha", "1"});
        CHECK(r.code == 0);
        CHECK(r.out.find("ideal       g2 1  g3 1  g4 1") != std::string::npos);
    }

    TEST_CASE("configuration errors exit 2 and name the field") {
        auto r = invoke({"point", "--eta", "1.5"});
        CHECK(r.code == 2);
        CHECK(r.err.find("eta") != std::string::npos);
        r = invoke({"point", "--alpha", "abc"});
        CHECK(r.code == 2);
        CHECK(r.err.find("alpha") != std::string::npos);
        CHECK(invoke({"point", "--unknown", "1"}).code == 2);
        CHECK(invoke({}).code == 2);
        CHECK(invoke({"sweep"}).code == 2);
        CHECK(invoke({"figure", "--preset", "fig9"}).code == 2);
        CHECK(invoke({"sweep", "--axis", "theta:0:1:3", "--format", "xml"}).code == 2);
    }

    TEST_CASE("unwritable output exits 3") {
        const fs::path blocker = scratch("io") / "file";
        std::ofstream(blocker) << "x";
        CHECK(invoke({"sweep", "--axis", "theta:0:1:3", "--out", (blocker / "x.csv").string()}).code == 3);
        CHECK(invoke({"figure", "--preset", "fig5", "--points", "2", "--out", (blocker / "dir").string()}).code == 3);
    }

    TEST_CASE("no signal exits 4") {
        const auto r = invoke({"mc", "--r", "0", "--alpha", "0", "--trials", "1000"});
        CHECK(r.code == 4);
        CHECK(r.err.find("no clicks") != std::string::npos);
    }

    TEST_CASE("truncation failure exits 5") {
        CHECK(invoke({"point", "--r", "6", "--alpha", "0"}).code == 5);
    }

    TEST_CASE("help exits 0") {
        const auto r = invoke({"sweep", "--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("--axis") != std::string::npos);
    }
}

TEST_SUITE("commands") {
    TEST_CASE("point reports every route") {
        const auto r = invoke({"point", "--r", "0.001", "--alpha", "0.032", "--eta", "0.5", "--gamma", "1e-5"});
        REQUIRE(r.code == 0);
        for (const char* key : {"ideal", "moments", "click", "dB", "truncation", "printed"}) {
            CHECK(r.out.find(key) != std::string::npos);
        }
        CHECK(r.out.find("click       g2 0.0417") != std::string::npos);
    }

    TEST_CASE("sweep csv to stdout") {
        const auto r = invoke({"sweep", "--axis", "alpha:0.1:1:4:log", "--r", "0"});
        REQUIRE(r.code == 0);
        CHECK(r.out.rfind("alpha,g2,g3,g4,mean_clicks,pipeline,diagnostics\n", 0) == 0);
        CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
    }

    TEST_CASE("extremum json") {
        const auto r = invoke({"extremum", "--order", "2", "--param", "alpha", "--range", "1e-3", "1", "--r", "0.001",
                               "--format", "json"});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("\"location\": 0.031") != std::string::npos);
    }

    TEST_CASE("boundary extremum warns but succeeds") {
        const auto r = invoke({"extremum", "--param", "alpha", "--range", "1", "3", "--r", "0.3", "--mode", "max",
                               "--grid", "10"});
        CHECK(r.code == 0);
        CHECK(r.err.find("boundary") != std::string::npos);
        CHECK(r.out.find("boundary extremum") != std::string::npos);
    }

    TEST_CASE("mc agrees with the two-photon source") {
        const auto r = invoke({"mc", "--fock", "2", "--trials", "200000", "--seed", "5"});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("exact 0.75") != std::string::npos);
        CHECK(r.err.empty());
    }

    TEST_CASE("figure writes hashed files, a manifest, and honours the output directory variable") {
        const fs::path dir = scratch("figure");
        ::setenv("SQHBT_OUTPUT_DIR", dir.c_str(), 1);
        const auto r = invoke({"figure", "--preset", "fig5", "--points", "5", "--out", "fig5"});
        ::unsetenv("SQHBT_OUTPUT_DIR");
        REQUIRE(r.code == 0);
        std::size_t csv = 0;
        for (const auto& e : fs::directory_iterator(dir / "fig5")) {
            const std::string name = e.path().filename().string();
            CHECK(name.rfind("fig5_", 0) == 0);
            if (e.path().extension() == ".csv") {
                ++csv;
                CHECK(slurp(e.path()).rfind("r,g2,g3,g4,mean_clicks,pipeline,diagnostics\n", 0) == 0);
            }
        }
        CHECK(csv == 6);
        CHECK(fs::exists(dir / "fig5" / "fig5_manifest.json"));
    }
}

TEST_SUITE("config round trip") {
    TEST_CASE("emitted configuration reproduces byte-identical output") {
        const fs::path dir = scratch("roundtrip");
        const std::string out1 = (dir / "a.csv").string();
        const std::string cfg = (dir / "cfg.json").string();
        REQUIRE(invoke({"sweep", "--axis", "theta:0:2pi:7", "--axis", "eta:0.1:1:3", "--r", "0.001", "--alpha",
                        "0.032", "--gamma", "1e-5", "--pipeline", "click", "--out", out1, "--emit-config", cfg})
                    .code == 0);
        const std::string first = slurp(out1);
        fs::remove(out1);
        REQUIRE(invoke({"sweep", "--config", cfg}).code == 0);
        CHECK(slurp(out1) == first);

        // Flags override file values.
        const auto dumped = invoke({"dump-config", "--config", cfg, "--alpha", "0.5"});
        REQUIRE(dumped.code == 0);
        CHECK(dumped.out.find("\"alpha\": 0.5") != std::string::npos);
        CHECK(dumped.out.find("\"command\": \"sweep\"") != std::string::npos);
    }

    TEST_CASE("mc runs are reproducible from their configuration") {
        const fs::path dir = scratch("mc");
        const std::string out1 = (dir / "m.json").string();
        const std::string cfg = (dir / "mc.json").string();
        REQUIRE(invoke({"mc", "--r", "0.2", "--alpha", "0.5", "--trials", "100000", "--seed", "9", "--format", "json",
                        "--out", out1, "--emit-config", cfg})
                    .code == 0);
        const std::string first = slurp(out1);
        REQUIRE(invoke({"mc", "--config", cfg}).code == 0);
        CHECK(slurp(out1) == first);
    }

    TEST_CASE("dump-config rejects invalid settings") {
        CHECK(invoke({"dump-config", "--for", "sweep"}).code == 2);
        CHECK(invoke({"dump-config", "--for", "nonsense"}).code == 2);
        const auto r = invoke({"dump-config", "--for", "figure", "--preset", "fig3"});
        CHECK(r.code == 0);
        CHECK(r.out.find("\"schema\": \"sqhbt.run/1\"") != std::string::npos);
    }
}
