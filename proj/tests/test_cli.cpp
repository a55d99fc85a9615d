#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qcorr/cli.hpp"
#include "qcorr/qcorr.hpp"

using namespace qcorr;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / fs::path("qcorr_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("state files round-trip and enforce validation") {
    TempDir tmp;
    const DensityMatrix rho = random_mixed({2, 3}, 3, 2718);
    const std::string path = tmp.file("state.json");
    save_state(rho, path);
    const DensityMatrix back = load_state(path);
    CHECK(back.dims == rho.dims);
    CHECK((back.matrix - rho.matrix).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(parse_state_text("this is not json"), parse_error);
    CHECK_THROWS_AS(parse_state_text("{\"dims\": [2,2]}"), parse_error);
    // Structurally fine but trace 2 -> validation failure.
    CHECK_THROWS_AS(
        parse_state_text("{\"dims\": [2], \"matrix\": [[[1,0],[0,0]],[[0,0],[1,0]]]}"),
        trace_error);
}

TEST_CASE("measure command reproduces the Werner-GHZ closed forms") {
    TempDir tmp;
    const std::string out = tmp.file("report.json");
    const int code = cli::run({"measure", "--spec", "werner_ghz:lambda=0.5", "--variant", "both",
                               "--permutation", "max", "--json", "--out", out});
    REQUIRE(code == cli::kOk);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j["schema"] == cli::kSchemaVersion);
    REQUIRE(j["reports"].size() == 2);
    const double total_plain = j["reports"][0]["total_plain"].get<double>();
    const double total_mu = j["reports"][1]["total_mu"].get<double>();
    CHECK(total_plain == Approx(3.0 / 16.0).margin(1e-9));
    CHECK(total_mu == Approx(0.65).margin(1e-9));
}

TEST_CASE("measure command on a Bell state file gives total 1/2") {
    TempDir tmp;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    save_state({{2, 2}, psi * psi.adjoint()}, tmp.file("bell.json"));

    const std::string out = tmp.file("bell_report.json");
    const int code =
        cli::run({"measure", "--input", tmp.file("bell.json"), "--json", "--out", out});
    REQUIRE(code == cli::kOk);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j["reports"][0]["total_plain"].get<double>() == Approx(0.5).margin(1e-9));
    CHECK(j["reports"][0]["steps"][1]["q_plain"].get<double>() == Approx(0.0).margin(1e-10));
}

TEST_CASE("malformed input exits with the parse code and writes nothing") {
    TempDir tmp;
    std::ofstream(tmp.file("broken.json")) << "{\"dims\": [2,2], \"matrix\": oops";
    const std::string out = tmp.file("never.json");
    const int code = cli::run({"measure", "--input", tmp.file("broken.json"), "--out", out});
    CHECK(code == cli::kParseError);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("invalid states exit with the validation code") {
    TempDir tmp;
    std::ofstream(tmp.file("bad.json"))
        << "{\"dims\": [2], \"matrix\": [[[1,0],[0,0]],[[0,0],[1,0]]]}";
    const int code = cli::run({"measure", "--input", tmp.file("bad.json")});
    CHECK(code == cli::kValidationError);
}

TEST_CASE("permutation limit exits with its own code") {
    TempDir tmp;
    // Nine qubits: 9! permutations exceed the default limit of 8 subsystems.
    std::vector<double> probs(512, 1.0 / 512.0);
    save_state(classical_diagonal(std::vector<int>(9, 2), probs), tmp.file("nine.json"));
    const int code = cli::run({"measure", "--input", tmp.file("nine.json")});
    CHECK(code == cli::kPermutationLimit);
}

TEST_CASE("explicit permutations and flag errors") {
    CHECK(cli::run({"measure", "--spec", "werner:m=2,x=0.9", "--permutation", "2,1"}) == cli::kOk);
    CHECK(cli::run({"measure", "--spec", "werner:m=2,x=0.9", "--permutation", "2,2"}) ==
          cli::kParseError);
    CHECK(cli::run({"measure", "--spec", "werner:m=2,x=0.9", "--variant", "bogus"}) ==
          cli::kParseError);
    CHECK(cli::run({"measure"}) == cli::kParseError);  // neither input nor spec
    CHECK(cli::run({"no-such-command"}) == cli::kParseError);
}

TEST_CASE("scan-ising emits the pinned CSV contract") {
    TempDir tmp;
    const std::string out = tmp.file("scan.csv");
    const int code = cli::run({"scan-ising", "--spins", "16", "--grid", "0.2:1.8:0.01", "--out",
                               out});
    REQUIRE(code == cli::kOk);
    const std::string text = slurp(out);
    const auto lines = lines_of(text);
    REQUIRE(lines.size() == 163);  // header + 161 rows + peak footer
    CHECK(lines[0] == "h,q_total,dq_dh");
    CHECK(lines.back().rfind("# peak: h=", 0) == 0);
    CHECK(text.find("\r") == std::string::npos);  // LF endings only

    // 12-significant-digit fields, '.' decimal separator.
    const auto first_row = lines[1];
    CHECK(first_row.substr(0, 4) == "0.2,");

    const std::string out2 = tmp.file("scan2.csv");
    REQUIRE(cli::run({"scan-ising", "--spins", "16", "--grid", "0.2:1.8:0.01", "--out", out2}) ==
            cli::kOk);
    CHECK(slurp(out2) == text);  // byte-identical rerun
}

TEST_CASE("scan-ising rejects coarse grids and odd sizes") {
    CHECK(cli::run({"scan-ising", "--spins", "16", "--grid", "0:1:0.5"}) == cli::kParseError);
    CHECK(cli::run({"scan-ising", "--spins", "7", "--grid", "0.2:1.8:0.1", "--out", "-"}) ==
          cli::kParseError);
    CHECK(cli::run({"scan-ising", "--spins", "16", "--grid", "1.8:0.2:0.1"}) == cli::kParseError);
}

TEST_CASE("reproduce fig3 carries the closed-form columns") {
    TempDir tmp;
    const std::string out = tmp.file("fig3.csv");
    REQUIRE(cli::run({"reproduce", "--figure", "fig3", "--out", out}) == cli::kOk);
    const auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 52);
    CHECK(lines[0] == "lambda,q_total,q_total_mu,d_s,d_gg");
    // The last row is lambda = 1: plain 0.75, mu 2, D_s 1, D_GG 0.5.
    std::stringstream row(lines.back());
    std::string field;
    std::vector<double> vals;
    while (std::getline(row, field, ',')) vals.push_back(std::stod(field));
    REQUIRE(vals.size() == 5);
    CHECK(vals[0] == Approx(1.0).margin(1e-12));
    CHECK(vals[1] == Approx(0.75).margin(1e-8));
    CHECK(vals[2] == Approx(2.0).margin(1e-8));
    CHECK(vals[3] == Approx(1.0).margin(1e-10));
    CHECK(vals[4] == Approx(0.5).margin(1e-12));
}

TEST_CASE("reproduce fig5 marks the discontinuity near 0.75") {
    TempDir tmp;
    const std::string out = tmp.file("fig5.csv");
    REQUIRE(cli::run({"reproduce", "--figure", "fig5", "--out", out}) == cli::kOk);
    const auto lines = lines_of(slurp(out));
    const std::string& footer = lines.back();
    REQUIRE(footer.rfind("# discontinuity: lambda=", 0) == 0);
    const double where = std::stod(footer.substr(std::string("# discontinuity: lambda=").size()));
    CHECK(std::abs(where - 0.75) <= 0.005);
}

TEST_CASE("reproduce werner-table contains the m=2, x=1 closed-form value") {
    TempDir tmp;
    const std::string out = tmp.file("wt.csv");
    REQUIRE(cli::run({"reproduce", "--figure", "werner-table", "--out", out}) == cli::kOk);
    const auto lines = lines_of(slurp(out));
    CHECK(lines[0] == "m,x,q_mu");
    bool found = false;
    for (const auto& line : lines) {
        if (line.rfind("2,1,", 0) == 0) {
            const double q = std::stod(line.substr(4));
            CHECK(q == Approx(1.0 / 9.0).margin(1e-8));
            found = true;
        }
    }
    CHECK(found);
    CHECK(cli::run({"reproduce", "--figure", "fig99"}) == cli::kParseError);
}

TEST_CASE("oracle-check passes on a small seeded ensemble") {
    TempDir tmp;
    const std::string out = tmp.file("oracle.txt");
    const int code = cli::run({"oracle-check", "--seed", "1", "--qubit-samples", "6",
                               "--corollary-samples", "6", "--tripartite-samples", "3", "--out",
                               out});
    CHECK(code == cli::kOk);
    const std::string text = slurp(out);
    CHECK(text.find("result: pass") != std::string::npos);
    CHECK(text.find("schema: ") != std::string::npos);
}
