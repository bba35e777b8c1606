#include "thetastrat/config.hpp"
#include "thetastrat/report.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>

using namespace thetastrat;

namespace {

const char* kVortexConfig = R"(
command = "strata"
seed = 7

[root_datum]
type = "GL1"

[reps]
V = [[[1], 1]]
X = [[[1], 1]]

[norm]
b = "identity"

[stability]
chi = ["-3"]
degree = [-1]
gamma = "8"

[index]
genus = 0
)";

}  // namespace

TEST_CASE("toml subset parser") {
    auto t = parse_toml("a = 3\nb = \"x/y\"\n[sec]\nc = [1, 2, [3, 4]]\nflag = true\n# comment\n");
    CHECK(t.at("a").integer() == 3);
    CHECK(t.at("b").str() == "x/y");
    CHECK(t.at("sec.c").array()[2].array()[1].integer() == 4);
    CHECK(std::get<bool>(t.at("sec.flag").v));
    CHECK_THROWS_AS(parse_toml("x = 1.5\n"), config_error);   // floats rejected
    CHECK_THROWS_AS(parse_toml("x = 1\nx = 2\n"), config_error);
    CHECK_THROWS_AS(parse_toml("nonsense\n"), config_error);

    // multiline arrays
    auto m = parse_toml("rows = [[1, 2],\n  [3, 4]]\n");
    CHECK(m.at("rows").array().size() == 2);
}

TEST_CASE("run config loads the vortex example") {
    RunConfig cfg = load_run_config(kVortexConfig);
    CHECK(cfg.datum.rank == 1);
    CHECK(cfg.v.entries.size() == 1);
    CHECK(cfg.chi == (QVec{Rational(-3)}));
    CHECK(cfg.gamma == 8);
    CHECK(cfg.level.matrix(0, 0) == 1);  // ch2 of weight-1 V
    CHECK(cfg.genus == 0);
}

TEST_CASE("config echo round-trips to the same hash") {
    RunConfig cfg = load_run_config(kVortexConfig);
    std::string echo = cfg.raw.canonical();
    TomlTable reparsed = parse_toml(echo);
    CHECK(config_hash(reparsed) == config_hash(cfg.raw));
    CHECK(reparsed.canonical() == echo);
}

TEST_CASE("schema violations surface as config errors") {
    CHECK_THROWS_AS(load_run_config("x = 1\n"), config_error);  // no root datum
    // malformed weight vector: entry is not a [weights, mult] pair
    std::string bad = "[root_datum]\ntype = \"GL1\"\n[reps]\nV = [[1]]\n";
    CHECK_THROWS_AS(load_run_config(bad), config_error);
    // non-invariant chi on A1
    std::string badchi =
        "[root_datum]\ntype = \"A1\"\n[reps]\nV = [[[1], 1], [[-1], 1]]\n[stability]\nchi = [1]\n";
    CHECK_THROWS_AS(load_run_config(badchi), config_error);
}

TEST_CASE("exit codes through the binary") {
#ifdef THETASTRAT_BIN
    std::string bin = THETASTRAT_BIN;
    {
        std::ofstream f("/tmp/thetastrat_bad.toml");
        f << "x = 1\n";
    }
    int rc = std::system((bin + " strata --config /tmp/thetastrat_bad.toml > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 2);
    {
        std::ofstream f("/tmp/thetastrat_ok.toml");
        f << kVortexConfig;
    }
    rc = std::system((bin + " strata --config /tmp/thetastrat_ok.toml --out /tmp/thetastrat_out.json").c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    // mathematical precondition failure: inadmissible level orientation
    {
        std::ofstream f("/tmp/thetastrat_prec.toml");
        f << "[root_datum]\ntype = \"A1\"\n[reps]\nV = [[[1], 1], [[-1], 1]]\n"
          << "[norm]\nb = \"explicit\"\nrows = [[2]]\n"
          << "[level]\nmatrix = \"explicit\"\nrows = [[6]]\norientation = 1\n";
    }
    rc = std::system((bin + " index --config /tmp/thetastrat_prec.toml > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 3);
#endif
}

TEST_CASE("report json shapes") {
    RunConfig cfg = load_run_config(kVortexConfig);
    Json rep = make_report("strata", cfg.raw, Json::object(), 1.0);
    CHECK(rep["schema"] == "v1");
    CHECK(rep["command"] == "strata");
    CHECK(rep.contains("config_hash"));
}
