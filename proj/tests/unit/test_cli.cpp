#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using isocorr::cli::run;

namespace {

const std::string kData = ISOCORR_TEST_DATA;

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

class Scratch {
public:
    Scratch() : root_(fs::temp_directory_path() / ("isocorr_cli_" + std::to_string(::getpid()))) {
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    ~Scratch() { fs::remove_all(root_); }
    std::string path(const std::string& name) const { return (root_ / name).string(); }

private:
    fs::path root_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

void require_identical_dirs(const std::string& a, const std::string& b) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
    REQUIRE_FALSE(names.empty());
    for (const auto& name : names) {
        INFO(name);
        REQUIRE(fs::exists(fs::path(b) / name));
        CHECK(slurp(a + "/" + name) == slurp(b + "/" + name));
    }
}

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"pairs", "--out", "x"}).code == 2);
    CHECK(invoke({"allocate", "--input", "a", "--out", "b", "--rho", "0.1", "--lambda", "1", "--model", "kelly"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("cli: missing input file exits 4 and names the path") {
    Scratch s;
    const auto r = invoke({"pairs", "--input", s.path("nope.csv"), "--out", s.path("o")});
    CHECK(r.code == 4);
    CHECK(r.err.find("nope.csv") != std::string::npos);
}

TEST_CASE("cli: ingest a gappy price file") {
    Scratch s;
    const auto r = invoke({"ingest", "--input", kData + "/prices_gappy.csv", "--out", s.path("ing"),
                           "--min-coverage", "0.8"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("dropped BBB") != std::string::npos);
    const auto report = nlohmann::json::parse(slurp(s.path("ing/ingest_report.json")));
    CHECK(report["assets_loaded"] == 2);
    CHECK(report["assets_dropped"].size() == 1);
    CHECK(report["dates_dropped"] == 1);
    CHECK(lines(slurp(s.path("ing/returns.csv"))).size() == 1 + 2 * 4);
    const auto manifest = nlohmann::json::parse(slurp(s.path("ing/manifest.json")));
    CHECK(manifest["command"] == "ingest");
    CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
    CHECK(manifest["outputs"].size() == 3);

    const auto bad = invoke({"ingest", "--input", kData + "/prices_negative.csv", "--out", s.path("bad")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("prices_negative.csv:8") != std::string::npos);
}

TEST_CASE("cli: pairs on a two-asset panel") {
    Scratch s;
    REQUIRE(invoke({"synth", "--out", s.path("syn"), "--assets", "2", "--periods", "60"}).code == 0);
    const auto r = invoke({"pairs", "--input", s.path("syn/prices.csv"), "--out", s.path("p"), "--trials", "20"});
    REQUIRE(r.code == 0);
    const auto rows = lines(slurp(s.path("p/pairs.csv")));
    CHECK(rows.size() == 21);
    CHECK(rows[0] == "trial,asset_a,asset_b,r,z,n_obs");
    CHECK(rows[1].find(",A0000,A0001,") != std::string::npos);
    const auto summary = nlohmann::json::parse(slurp(s.path("p/pairs_summary.json")));
    CHECK(summary["pair_population"] == 1);
    CHECK(summary["ks_p"].is_number());
    CHECK(lines(slurp(s.path("p/hist_z.csv"))).size() == 51);
}

TEST_CASE("cli: pairs reference mean convention") {
    Scratch s;
    REQUIRE(invoke({"synth", "--out", s.path("syn"), "--assets", "20", "--periods", "200"}).code == 0);
    REQUIRE(invoke({"pairs", "--input", s.path("syn/prices.csv"), "--out", s.path("a"), "--trials", "200",
                    "--ref-mean", "scaled"})
                .code == 0);
    const auto summary = nlohmann::json::parse(slurp(s.path("a/pairs_summary.json")));
    const double expected = std::sqrt(200.0 - 3.0) * summary["atanh_mean_r"].get<double>();
    CHECK(summary["ks_reference"]["mean"].get<double>() == doctest::Approx(expected));
}

TEST_CASE("cli: ndof with a single trial skips the fit") {
    Scratch s;
    REQUIRE(invoke({"synth", "--out", s.path("syn"), "--assets", "10", "--periods", "50"}).code == 0);
    const auto r = invoke({"ndof", "--input", s.path("syn/prices.csv"), "--out", s.path("n"), "--trials", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("fit skipped") != std::string::npos);
    CHECK(lines(slurp(s.path("n/trials.csv"))).size() == 2);
    const auto fit = nlohmann::json::parse(slurp(s.path("n/fit.json")));
    CHECK(fit["fit"].is_null());
    CHECK(lines(slurp(s.path("n/curves.csv"))).size() == 11);
}

TEST_CASE("cli: ndof on synthetic isotropic data recovers rho") {
    Scratch s;
    REQUIRE(invoke({"synth", "--out", s.path("syn"), "--assets", "150", "--periods", "1500", "--rho", "0.2"}).code == 0);
    REQUIRE(invoke({"ndof", "--input", s.path("syn/prices.csv"), "--out", s.path("n"), "--trials", "400"}).code == 0);
    const auto fit = nlohmann::json::parse(slurp(s.path("n/fit.json")));
    const double terminal = fit["verdict"]["rho_hat_terminal"].get<double>();
    const double intercept = fit["verdict"]["rho_hat_intercept"].get<double>();
    CHECK(std::abs(terminal - 0.2) <= 0.3 * 0.2);
    CHECK(std::abs(intercept - 0.2) <= 0.3 * 0.2);
}

TEST_CASE("cli: allocate identity case and singular model") {
    Scratch s;
    {
        std::ofstream f(s.path("alpha.csv"));
        f << "asset_id,alpha,sigma\nX,0.01,1\nY,-0.02,1\nZ,0.005,1\n";
    }
    REQUIRE(invoke({"allocate", "--input", s.path("alpha.csv"), "--out", s.path("a"), "--rho", "0", "--lambda", "0.5"})
                .code == 0);
    const auto rows = lines(slurp(s.path("a/weights.csv")));
    REQUIRE(rows.size() == 4);
    CHECK(rows[1] == "X,0.01");
    CHECK(rows[2] == "Y,-0.02");
    CHECK(rows[3] == "Z,0.005");
    const auto diag = nlohmann::json::parse(slurp(s.path("a/diagnostics.json")));
    CHECK(diag["omega"] == 1.0);
    CHECK(diag["centering_factor"] == 0.0);

    REQUIRE(invoke({"allocate", "--input", s.path("alpha.csv"), "--out", s.path("l"), "--rho", "0", "--lambda",
                    "0.5", "--model", "laplace"})
                .code == 0);
    CHECK(nlohmann::json::parse(slurp(s.path("l/diagnostics.json")))["omega"].get<double>() < 2.0);

    const auto sing = invoke({"allocate", "--input", s.path("alpha.csv"), "--out", s.path("b"), "--rho", "1",
                              "--lambda", "1"});
    CHECK(sing.code == 3);
    CHECK(sing.err.find("singular") != std::string::npos);

    const auto infeasible = invoke({"allocate", "--input", s.path("alpha.csv"), "--out", s.path("c"), "--rho",
                                    "-0.9", "--lambda", "1"});
    CHECK(infeasible.code == 2);
}

TEST_CASE("cli: curves grid") {
    Scratch s;
    REQUIRE(invoke({"curves", "--out", s.path("c"), "--rho", "0.25,0.5,1", "--n-grid", "1,10,10000"}).code == 0);
    const auto risk = lines(slurp(s.path("c/risk.csv")));
    CHECK(risk.size() == 1 + 3 * 3);
    CHECK(lines(slurp(s.path("c/centering.csv"))).size() == 10);
    CHECK(lines(slurp(s.path("c/nstar.csv"))).size() == 10);
    CHECK(risk[0] == "rho,n,v_s,v_r,ratio");
    const std::string last25 = risk[3];
    CHECK(last25.rfind("0.25,10000,", 0) == 0);
    const double ratio = std::stod(last25.substr(last25.rfind(',') + 1));
    CHECK(ratio == doctest::Approx(3.0).epsilon(0.01));
    for (int i = 7; i <= 9; ++i) {
        std::vector<std::string> fields;
        std::stringstream ss(risk[static_cast<std::size_t>(i)]);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        CHECK(fields[0] == "1");
        CHECK(fields[3] == "0");
    }
}

TEST_CASE("cli: algebra dump") {
    Scratch s;
    REQUIRE(invoke({"algebra", "--out", s.path("g"), "--n", "2", "--rho", "0.5"}).code == 0);
    CHECK(slurp(s.path("g/G.csv")) == "1,0.5\n0.5,1\n");
    const auto inv = lines(slurp(s.path("g/G_inverse.csv")));
    REQUIRE(inv.size() == 2);
    CHECK(std::stod(inv[0].substr(0, inv[0].find(','))) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("cli: every command is byte-identical across repeated runs") {
    Scratch s;
    {
        std::ofstream f(s.path("alpha.csv"));
        f << "asset_id,alpha,sigma\nX,0.01,0.2\nY,-0.02,0.3\nZ,0.005,0.25\n";
    }
    for (const char* run_dir : {"r1", "r2"}) {
        const std::string d = s.path(run_dir);
        REQUIRE(invoke({"synth", "--out", d + "/syn", "--assets", "40", "--periods", "120", "--seed", "5"}).code == 0);
        REQUIRE(invoke({"synth", "--out", d + "/fsyn", "--model", "factor", "--assets", "30", "--periods", "80"}).code == 0);
        // Inputs are shared so the manifests' input records compare equal.
        REQUIRE(invoke({"ingest", "--input", s.path("r1/syn/prices.csv"), "--out", d + "/ing"}).code == 0);
        REQUIRE(invoke({"pairs", "--input", s.path("r1/syn/prices.csv"), "--out", d + "/pairs", "--trials", "300",
                        "--seed", "9"})
                    .code == 0);
        REQUIRE(invoke({"ndof", "--input", s.path("r1/syn/prices.csv"), "--out", d + "/ndof", "--trials", "150",
                        "--seed", "9"})
                    .code == 0);
        REQUIRE(invoke({"allocate", "--input", s.path("alpha.csv"), "--out", d + "/alloc", "--rho", "0.2",
                        "--lambda", "2", "--model", "laplace"})
                    .code == 0);
        REQUIRE(invoke({"curves", "--out", d + "/curves"}).code == 0);
        REQUIRE(invoke({"algebra", "--out", d + "/alg", "--n", "5", "--rho", "0.1"}).code == 0);
    }
    for (const char* cmd : {"syn", "fsyn", "ing", "pairs", "ndof", "alloc", "curves", "alg"}) {
        INFO(cmd);
        require_identical_dirs(s.path(std::string("r1/") + cmd), s.path(std::string("r2/") + cmd));
    }
}
