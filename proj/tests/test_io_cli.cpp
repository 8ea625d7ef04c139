#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "wasabi/cli.hpp"
#include "wasabi/errors.hpp"
#include "wasabi/io.hpp"

using namespace wasabi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("wasabi_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_file(const std::string& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "wasabi");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("draws csv parsing") {
    std::istringstream ok("5,5,2\n\n1,2,3\n");
    auto d = read_draws(ok);
    CHECK(d.draws.size() == 2);
    CHECK(d.relabeled);
    CHECK(d.draws[0].labels() == std::vector<Label>{0, 0, 1});

    std::istringstream canonical("0,0,1\n0,1,2\n");
    CHECK_FALSE(read_draws(canonical).relabeled);

    std::istringstream ragged("0,0,1\n0,1\n");
    try {
        read_draws(ragged);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    std::istringstream bad("0,0,1\n0,1,2\n0,x,1\n");
    try {
        read_draws(bad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    std::istringstream fractional("0,1.5\n");
    CHECK_THROWS_AS(read_draws(fractional), DataError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_draws(empty), DataError);
}

TEST_CASE("draws round trip is byte identical after canonicalization") {
    TempDir tmp;
    write_file(tmp / "in.csv", "3,3,7,1\n2,2,2,2\n0,1,0,1\n");
    auto loaded = read_draws_file(tmp / "in.csv");
    {
        std::ofstream out(tmp / "once.csv");
        write_partitions(out, loaded.draws.draws());
    }
    auto again = read_draws_file(tmp / "once.csv");
    CHECK_FALSE(again.relabeled);
    {
        std::ofstream out(tmp / "twice.csv");
        write_partitions(out, again.draws.draws());
    }
    CHECK(read_file(tmp / "once.csv") == read_file(tmp / "twice.csv"));
    CHECK(read_file(tmp / "once.csv") == "0,0,1,2\n0,0,0,0\n0,1,0,1\n");
    CHECK(file_digest(tmp / "once.csv") == file_digest(tmp / "twice.csv"));
    CHECK(file_digest(tmp / "once.csv") != file_digest(tmp / "in.csv"));
}

TEST_CASE("data csv round trip") {
    Dataset d;
    d.n = 2;
    d.dims = 2;
    d.values = {0.1, -2.5, 1e-300, 3.0};
    std::stringstream buf;
    write_data(buf, d);
    auto back = read_data(buf);
    CHECK(back.n == 2);
    CHECK(back.dims == 2);
    CHECK(back.values == d.values);
}

TEST_CASE("cli summarize, diagnose and exit codes") {
    TempDir tmp;
    write_file(tmp / "one.csv", "0,0,1\n1,1,0\n");
    CHECK(cli({"summarize", tmp / "one.csv", "--L", "1", "--out", tmp / "s1"}) == 0);
    auto summary = nlohmann::json::parse(read_file(tmp / "s1/summary.json"));
    CHECK(summary["wasserstein"].get<double>() == 0.0);
    CHECK(summary["schema_version"] == 1);
    CHECK(fs::exists(tmp / "s1/manifest.json"));

    std::ostringstream draws;
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        auto p = oracle::random_partition(8, 3, rng);
        for (std::size_t i = 0; i < 8; ++i) draws << (i ? "," : "") << p[i];
        draws << '\n';
    }
    write_file(tmp / "draws.csv", draws.str());
    const std::vector<std::string> args{"summarize", tmp / "draws.csv", "--L", "2", "--init", "topvi", "--seed", "7"};
    auto a = args;
    a.insert(a.end(), {"--out", tmp / "a"});
    auto b = args;
    b.insert(b.end(), {"--out", tmp / "b"});
    CHECK(cli(a) == 0);
    CHECK(cli(b) == 0);
    for (const char* f : {"particles.csv", "assignments.csv", "summary.json"}) {
        CHECK(read_file(tmp / (std::string("a/") + f)) == read_file(tmp / (std::string("b/") + f)));
    }

    CHECK(cli({"diagnose", tmp / "draws.csv", tmp / "a", "--region-psm"}) == 0);
    for (const char* f : {"meet.csv", "wasabi_psm.csv", "evic.csv", "vic.csv", "vicg.csv", "report.json",
                          "region_psm_0.csv", "manifest.json"}) {
        CHECK(fs::exists(tmp / (std::string("a/diagnostics/") + f)));
    }
    auto report = nlohmann::json::parse(read_file(tmp / "a/diagnostics/report.json"));
    CHECK(report["evi_identity_gap"].get<double>() <= 1e-9);

    CHECK(cli({"diagnose", tmp / "draws.csv", tmp / "s1"}) == 2);
    write_file(tmp / "ragged.csv", "0,1\n0\n");
    CHECK(cli({"summarize", tmp / "ragged.csv", "--out", tmp / "r"}) == 2);
    CHECK(cli({"summarize", tmp / "draws.csv", "--init", "bogus", "--out", tmp / "r"}) == 1);
    CHECK(cli({"summarize", tmp / "draws.csv", "--no-such-flag"}) == 1);
    CHECK(cli({}) == 1);
}

TEST_CASE("cli elbow, minvi, psm, simulate and gibbs") {
    TempDir tmp;
    write_file(tmp / "two.csv", "0,0,1\n0,1,2\n0,0,1\n");
    CHECK(cli({"elbow", tmp / "two.csv", "--L-max", "3", "--out", tmp / "e"}) == 0);
    const std::string elbow = read_file(tmp / "e/elbow.csv");
    CHECK(elbow.find("2,0") != std::string::npos);
    CHECK(fs::exists(tmp / "e/L3/summary.json"));

    CHECK(cli({"minvi", tmp / "two.csv", "--k-max", "5", "--runs", "8", "--seed", "1", "--out", tmp / "m1"}) == 0);
    CHECK(cli({"minvi", tmp / "two.csv", "--k-max", "5", "--runs", "8", "--seed", "1", "--out", tmp / "m2"}) == 0);
    CHECK(read_file(tmp / "m1") == read_file(tmp / "m2"));
    CHECK(read_file(tmp / "m1") == "0,0,1\n");

    write_file(tmp / "pair.csv", "0,0\n0,1\n");
    CHECK(cli({"psm", tmp / "pair.csv", "--out", tmp / "psm.csv"}) == 0);
    CHECK(read_file(tmp / "psm.csv") == "1,0.5\n0.5,1\n");

    CHECK(cli({"simulate", "--preset", "bimodal", "--n", "30", "--seed", "1", "--out", tmp / "data.csv"}) == 0);
    CHECK(cli({"gibbs", tmp / "data.csv", "--alpha", "1", "--iters", "40", "--burnin", "10", "--out",
               tmp / "g.csv"}) == 0);
    auto g = read_draws_file(tmp / "g.csv");
    CHECK(g.draws.size() == 30);
    CHECK(g.draws.n() == 30);
    CHECK(cli({"gibbs", tmp / "data.csv", "--alpha", "empirical", "--iters", "5", "--burnin", "1", "--out",
               tmp / "g2.csv"}) == 0);
    CHECK(cli({"gibbs", tmp / "data.csv", "--alpha", "-3", "--out", tmp / "g3.csv"}) == 1);
    CHECK(cli({"simulate", "--preset", "nope"}) == 1);
}
