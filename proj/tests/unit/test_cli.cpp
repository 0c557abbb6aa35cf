#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "commands.hpp"
#include "doctest.h"
#include "ergolab/errors.hpp"

using namespace ergolab;
namespace fs = std::filesystem;

namespace {

const std::string kCli = ERGOLAB_CLI_PATH;

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("ergolab_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// exit status of the CLI; stdout and stderr go to files in dir
int run(const std::string& args, const fs::path& dir) {
    std::string cmd = kCli + " " + args + " > " + (dir / "stdout").string() + " 2> " + (dir / "stderr").string();
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli text forms") {
    using cli::parse_complex;
    CHECK(parse_complex("0.5") == dyn::cplx(0.5, 0));
    CHECK(parse_complex("0.3i") == dyn::cplx(0, 0.3));
    CHECK(parse_complex("-i") == dyn::cplx(0, -1));
    CHECK(parse_complex("0.2 - 0.4i") == dyn::cplx(0.2, -0.4));
    CHECK(parse_complex("1e-3+2e-3i") == dyn::cplx(1e-3, 2e-3));
    CHECK_THROWS_AS(parse_complex("1..2"), ParseError);

    auto T = cli::parse_transform("rotation(sqrt(2), 1/3)");
    CHECK(T.dim() == 2);
    CHECK(cli::parse_transform("cyclic(5, 2)").is_cyclic());
    CHECK_THROWS_AS(cli::parse_transform("shift(1)"), ParseError);

    auto f = cli::parse_observable("fourier(1 0: 0.5; 0 -2: 0.3i)");
    dyn::Point x{dyn::fix_from_double(0.25), dyn::fix_from_double(0.125)};
    auto want = 0.5 * std::polar(1.0, 6.283185307179586 * 0.25) + dyn::cplx(0, 0.3) * std::polar(1.0, -6.283185307179586 * 0.25);
    CHECK(std::abs(f.eval(x) - want) < 1e-12);
    CHECK(cli::parse_observable("box(0:0.3)").integral(1, 0).real() == doctest::Approx(0.3));
    auto tab = cli::parse_observable("table(1, -0.5+0.8660254037844386i, -0.5-0.8660254037844386i)");
    CHECK(std::abs(cli::parse_observable("cychar(3, 1)").eval({1}, 3) - tab.eval({1}, 3)) < 1e-12);
    CHECK_THROWS_AS(cli::parse_observable("box(0-0.3)"), ParseError);
    CHECK(cli::parse_schedule({"1e3", "20000"}) == std::vector<long>{1000, 20000});
    CHECK_THROWS_AS(cli::parse_schedule({"1.5"}), ParseError);
}

TEST_CASE("cli reduce on the worked family") {
    auto d = scratch("reduce");
    CHECK(run("reduce --family '[(t^1.5, 0); (0, t^1.1)]' --out " + (d / "out").string(), d) == 0);
    std::string table = slurp(d / "out" / "table.csv");
    CHECK(table.find("3,(1 0 / 0 0),(0 7 / 0 0),7,1,1") != std::string::npos);
    std::string report = slurp(d / "out" / "report.jsonl");
    CHECK(report.find("\"terminal_type\":\"(0 7 / 0 0)\"") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    auto d = scratch("exit");
    SUBCASE("declared counterexample") {
        CHECK(run("average --T 'cyclic(3,1)' --f 'cychar(3,1)' --a 't^2' --tag 'out-of-regime: integer exponent'"
                  " --sample-kind all --samples 3 --schedule 1e3,1e4,1e5",
                  d) == 0);
        CHECK(slurp(d / "stdout").find("failure demo") != std::string::npos);
    }
    SUBCASE("malformed expression") {
        CHECK(run("average --T 'rotation(sqrt(2))' --f 'char(1)' --a 't^1.5+'", d) == 1);
        CHECK(slurp(d / "stderr").find("ParseError") != std::string::npos);
    }
    SUBCASE("theorem-regime tag on an integer exponent") {
        CHECK(run("average --T 'rotation(sqrt(2))' --f 'char(1)' --a 't^2'", d) == 1);
    }
    SUBCASE("verdict violation") {
        CHECK(run("average --T 'rotation(sqrt(2))' --f 'char(1)' --a 't^1.5' --schedule 10,20,30 --tolerance 1e-9", d) == 2);
    }
    SUBCASE("usage") {
        CHECK(run("", d) == 1);
        CHECK(run("weyl --alpha 'sqrt(2)'", d) == 1);
    }
    SUBCASE("negative syndetic case is not a violation") {
        CHECK(run("patterns --mode syndetic --L 10000 --set 'ap(2,3)|ap(2,3)' --ci 2 --a 't^2' --n-range 1:90", d) == 0);
        CHECK(slurp(d / "stdout").find("NotFoundAtScale") != std::string::npos);
    }
}

TEST_CASE("cli config round trip") {
    auto d = scratch("roundtrip");
    std::string a = (d / "a").string(), b = (d / "b").string();
    REQUIRE(run("--seed 7 recurrence --T 'rotation(sqrt(2))|rotation(sqrt(3))' --A 'box(0:0.3)' --a 't^1.5|t^1.1'"
                " --samples 64 --schedule 1e3,1e4 --out " + a,
                d) == 0);
    REQUIRE(run("--config " + a + "/config.toml --out " + b, d) == 0);
    for (auto f : {"report.jsonl", "table.csv", "config.toml"}) CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
    CHECK(slurp(fs::path(a) / "config.toml").find("seed = \"7\"") != std::string::npos);
    CHECK(!slurp(fs::path(a) / "report.jsonl").empty());
}

TEST_CASE("cli threads do not change reports") {
    auto d = scratch("threads");
    std::string args = "average --T 'rotation(sqrt(2))|rotation(sqrt(3))' --f 'char(1)|char(1)' --a 't^1.5|t^1.1' --schedule 1e3,1e4,1e5";
    REQUIRE(run("--threads 1 " + args + " --out " + (d / "one").string(), d) == 0);
    REQUIRE(run("--threads 3 " + args + " --out " + (d / "three").string(), d) == 0);
    CHECK(slurp(d / "one" / "report.jsonl") == slurp(d / "three" / "report.jsonl"));
}

TEST_CASE("cli precision cap surfaces as an error") {
    auto d = scratch("precision");
    // exact roots need no MPFR; t^1.5 + log t does, and 64 bits cannot settle every floor
    int rc = run("--precision-bits 64 parity --a 't^1.5 + log(t)' --N 1e5", d);
    CHECK((rc == 0 || rc == 1));
    if (rc == 1) CHECK(slurp(d / "stderr").find("PrecisionExhausted") != std::string::npos);
    CHECK(run("--precision-bits 8 parity --a 't^1.5' --N 10", d) == 1);
}

TEST_CASE("cli shipped configs") {
    auto d = scratch("configs");
    std::string src = ERGOLAB_SOURCE_DIR;
    std::string cmd = "cd '" + src + "' && " + kCli + " --config configs/reduce_worked.toml --out " + (d / "r").string() +
                      " > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(slurp(d / "r" / "table.csv").find("(0 7 / 0 0),7") != std::string::npos);
    CHECK(run("--config " + src + "/configs/squares_mod3.toml", d) == 0);
    CHECK(slurp(d / "stdout").find("\"verdict\"") != std::string::npos);
}
