#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rankone/cli.hpp"
#include "rankone/errors.hpp"

using namespace rankone;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json thue_morse_sequence() {
    return json{{"type", "substitution"}, {"images", {"01", "10"}}, {"seed_letter", 0}};
}

json small_family() {
    return json{{"a0", {{"u", {1.0, 1.0}}, {"v", {1.0, 1.0}}}},
                {"others", {{{2.0, 1.0}, {1.0, 1.0}}}}};
}

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::vector<const char*> argv{"rankone"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

std::string write_config(const json& j, const std::string& name) {
    std::string path = "/tmp/rankone_test_" + name + ".json";
    std::ofstream f(path);
    f << j.dump(2);
    return path;
}

} // namespace

TEST_CASE("family parsing accepts u,v and rank-one dense forms") {
    auto fam = cli::parse_family(small_family());
    CHECK(fam.dimension() == 2);
    CHECK(fam.all_nonnegative);

    json dense = {{"a0", {{"dense", {{1.0, 0.0}, {0.0, 0.0}}}}},
                  {"others", {{{2.0, 1.0}, {1.0, 1.0}}}}};
    auto fam2 = cli::parse_family(dense);
    CHECK(std::abs(fam2.a0.lambda() - lyap::Complex(1.0)) < 1e-12);

    json bad = {{"a0", {{"dense", {{1.0, 0.0}, {0.0, 1.0}}}}},
                {"others", {{{2.0, 1.0}, {1.0, 1.0}}}}};
    CHECK_THROWS_AS(cli::parse_family(bad), RankOneViolation);

    json complex_entries = {{"a0", {{"u", {1.0, {0.0, 1.0}}}, {"v", {1.0, 0.0}}}},
                            {"others", {{{2.0, 1.0}, {1.0, 1.0}}}}};
    auto fam3 = cli::parse_family(complex_entries);
    CHECK(fam3.a0.u(1) == lyap::Complex(0.0, 1.0));
}

TEST_CASE("cmd_sequence dumps a prefix") {
    std::ostringstream out;
    cli::cmd_sequence({{"sequence", thue_morse_sequence()}, {"length", 16}}, out);
    CHECK(out.str() == "0110100110010110\n");
}

TEST_CASE("cmd_freq compares methods on thue-morse") {
    std::ostringstream out;
    json cfg = {{"sequence", thue_morse_sequence()},
                {"frequency", {{"methods", {"durand", "michel"}}}}};
    cli::cmd_freq(cfg, out);
    std::string text = out.str();
    CHECK(text.find("method,durand") != std::string::npos);
    CHECK(text.find("method,michel") != std::string::npos);
    CHECK(text.find("1,0.16666666666666") != std::string::npos);
    CHECK(text.find("11,0.16666666666666") != std::string::npos);
    auto pos = text.find("max_discrepancy,");
    REQUIRE(pos != std::string::npos);
    double disc = std::stod(text.substr(pos + 16));
    CHECK(disc < 1e-10);
}

TEST_CASE("cmd_freq mirsky rows") {
    std::ostringstream out;
    json cfg = {{"sequence", {{"type", "bfree"}, {"set", {{"type", "squarefree"}}}}},
                {"frequency", {{"methods", {"mirsky"}}}}};
    cli::cmd_freq(cfg, out);
    std::string text = out.str();
    CHECK(text.find("1,0.0881458") != std::string::npos);
    CHECK(text.find("11,0.0716601") != std::string::npos);
    CHECK(text.find("111,0.1254869") != std::string::npos);
}

TEST_CASE("cmd_freq of an all-zero explicit word is empty") {
    std::ostringstream out;
    json cfg = {{"sequence", {{"type", "explicit"}, {"word", "000000"}}},
                {"frequency", {{"methods", {"empirical"}}, {"prefix_length", 6}}}};
    cli::cmd_freq(cfg, out);
    std::string text = out.str();
    CHECK(text.find("rho0,1\n") != std::string::npos);
    CHECK(text.substr(text.find("word,F\n") + 7).empty());
}

TEST_CASE("cmd_lyap closed form with direct comparison") {
    std::ostringstream out;
    json cfg = {{"sequence",
                 {{"type", "substitution"}, {"images", {"01", "0"}}, {"seed_letter", 0}}},
                {"family", small_family()},
                {"lyapunov", {{"direct_n", 100000}}}};
    cli::cmd_lyap(cfg, out);
    std::string text = out.str();
    CHECK(text.find("method,durand") != std::string::npos);
    auto pos = text.find("gap,");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(text.substr(pos + 4)) < 1e-2);
}

TEST_CASE("cmd_lyap reports lambdaZero as a value") {
    std::ostringstream out;
    json family = {{"a0", {{"u", {1.0, 0.0}}, {"v", {0.0, 1.0}}}},
                   {"others", {{{2.0, 1.0}, {1.0, 1.0}}}}};
    json cfg = {{"sequence", thue_morse_sequence()}, {"family", family}};
    cli::cmd_lyap(cfg, out);
    CHECK(out.str().find("closed_form,-inf") != std::string::npos);
    CHECK(out.str().find("degenerate_reason,lambdaZero") != std::string::npos);
}

TEST_CASE("cmd_lyap warns when rho0 vanishes") {
    std::ostringstream out;
    json cfg = {{"sequence", {{"type", "increasing-runs"}}},
                {"family", small_family()},
                {"frequency", {{"methods", {"empirical"}}, {"prefix_length", 200000}}}};
    cli::cmd_lyap(cfg, out);
    CHECK(out.str().find("hypotheses not met") != std::string::npos);
}

TEST_CASE("cmd_spectrum writes deterministic csv files") {
    json cfg = {{"potential", {{"f", {{0.0, 0.0}, {0.0, 1.0}}}}},
                {"weights", {{"type", "mobius2"}}},
                {"grid", {{"min", -20.0}, {"max", 20.0}, {"points", 41}}},
                {"output",
                 {{"pressure_csv", "/tmp/rankone_test_pressure.csv"},
                  {"spectrum_csv", "/tmp/rankone_test_spectrum.csv"},
                  {"pressure_svg", "/tmp/rankone_test_pressure.svg"}}}};
    std::ostringstream out1, out2;
    cli::cmd_spectrum(cfg, out1);
    std::string pressure1 = slurp("/tmp/rankone_test_pressure.csv");
    std::string spectrum1 = slurp("/tmp/rankone_test_spectrum.csv");
    std::string svg1 = slurp("/tmp/rankone_test_pressure.svg");
    cli::cmd_spectrum(cfg, out2);
    CHECK(out1.str() == out2.str());
    CHECK(slurp("/tmp/rankone_test_pressure.csv") == pressure1);
    CHECK(slurp("/tmp/rankone_test_spectrum.csv") == spectrum1);
    CHECK(slurp("/tmp/rankone_test_pressure.svg") == svg1);

    CHECK(pressure1.substr(0, 14) == "beta,psi,dpsi\n");
    CHECK(spectrum1.substr(0, 10) == "alpha,dim\n");
    CHECK(svg1.find("<polyline") != std::string::npos);
    CHECK(svg1.find("<text") != std::string::npos);

    auto pos = out1.str().find("alpha_max,");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(out1.str().substr(pos + 10)) == doctest::Approx(0.607927).epsilon(1e-5));
}

TEST_CASE("cmd_spectrum includes the beta=0 row for fibonacci weights") {
    json cfg = {{"potential", {{"f", {{0.0, 0.0}, {0.0, 1.0}}}}},
                {"weights",
                 {{"type", "substitution"}, {"images", {"01", "0"}}, {"seed_letter", 0}}},
                {"grid", {{"min", -2.0}, {"max", 2.0}, {"points", 5}}},
                {"output",
                 {{"pressure_csv", "/tmp/rankone_test_fib_pressure.csv"},
                  {"spectrum_csv", "/tmp/rankone_test_fib_spectrum.csv"}}}};
    std::ostringstream out;
    cli::cmd_spectrum(cfg, out);
    std::string pressure = slurp("/tmp/rankone_test_fib_pressure.csv");
    auto pos = pressure.find("\n0,");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(pressure.substr(pos + 3)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("cmd_spectrum rejects an empty grid") {
    json cfg = {{"potential", {{"f", {{0.0, 0.0}, {0.0, 1.0}}}}},
                {"weights", {{"type", "mobius2"}}},
                {"grid", {{"points", 0}}},
                {"output",
                 {{"pressure_csv", "/tmp/x.csv"}, {"spectrum_csv", "/tmp/y.csv"}}}};
    std::ostringstream out;
    CHECK_THROWS_AS(cli::cmd_spectrum(cfg, out), GridEmpty);
}

TEST_CASE("run maps errors to exit codes") {
    std::string text;
    CHECK(run_cli({"freq", "-c", "/nonexistent.json"}, &text) == 2);

    std::string missing = write_config({{"frequency", json::object()}}, "missing_sequence");
    CHECK(run_cli({"freq", "-c", missing}, &text) == 2);
    CHECK(text.find("sequence") != std::string::npos);

    std::string noseed =
        write_config({{"sequence", {{"type", "bernoulli"}, {"p", {0.5, 0.5}}}}}, "noseed");
    CHECK(run_cli({"freq", "-c", noseed}, &text) == 2);
    CHECK(text.find("seed") != std::string::npos);

    std::string seq = write_config({{"sequence", thue_morse_sequence()}}, "sequence");
    CHECK(run_cli({"sequence", "-c", seq, "-n", "8"}, &text) == 0);
    CHECK(text == "01101001\n");

    std::string unreachable = write_config(
        {{"sequence", {{"type", "bfree"}, {"set", {{"type", "squarefree"}}}}},
         {"frequency", {{"methods", {"mirsky"}}, {"precision", 1e-15}}}},
        "unreachable");
    CHECK(run_cli({"freq", "-c", unreachable}, &text) == 3);
}

TEST_CASE("validate subcommand runs a subset") {
    std::string text;
    CHECK(run_cli({"validate", "--ids", "1"}, &text) == 0);
    CHECK(text.find("criterion,1,PASS") != std::string::npos);
    CHECK(text.find("criterion,2,") == std::string::npos);
}
