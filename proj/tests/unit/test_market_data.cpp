#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "isocorr/error.hpp"
#include "isocorr/market_data.hpp"
#include "isocorr/synthetic.hpp"
#include "oracles.hpp"

using namespace isocorr;

namespace {

const std::string kData = ISOCORR_TEST_DATA;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string validation_message(const std::string& text) {
    std::istringstream in(text);
    try {
        read_price_csv(in, "fixture.csv");
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("load_price_csv: golden fixture") {
    const auto p = load_price_csv(kData + "/prices_golden.csv");
    CHECK(p.dates_count() == 5);
    CHECK(p.assets() == 3);
    CHECK(p.asset_ids == std::vector<std::string>{"AAA", "BBB", "CCC"});
    CHECK(p.dates.front() == "2024-10-01");
    CHECK(p.dates.back() == "2024-10-07");
    CHECK(p.adjusted_close(1, 0) == 110.0);
    CHECK(p.missing_cells() == 0);
}

TEST_CASE("load_price_csv: shuffled rows and CRLF give the same panel") {
    const auto a = load_price_csv(kData + "/prices_golden.csv");
    const auto b = load_price_csv(kData + "/prices_shuffled.csv");
    CHECK(a.asset_ids == b.asset_ids);
    CHECK(a.dates == b.dates);
    CHECK(a.adjusted_close == b.adjusted_close);
}

TEST_CASE("load_price_csv: canonical round trip is byte-identical") {
    for (const char* name : {"/prices_golden.csv", "/fetcher_contract.csv"}) {
        const std::string original = slurp(kData + name);
        std::ostringstream out;
        write_price_csv(load_price_csv(kData + name), out);
        CHECK(out.str() == original);
    }
}

TEST_CASE("load_price_csv: rejections name the offending line") {
    const std::string neg = [] {
        try {
            load_price_csv(kData + "/prices_negative.csv");
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    }();
    CHECK(neg.find("prices_negative.csv:8:") != std::string::npos);
    CHECK(neg.find("non-positive") != std::string::npos);

    CHECK_THROWS_AS(load_price_csv(kData + "/prices_duplicate.csv"), ValidationError);
    CHECK_THROWS_AS(load_price_csv(kData + "/does_not_exist.csv"), IoError);

    const std::string header = "date,asset_id,adjusted_close\n";
    CHECK(validation_message("date,ticker,close\n2024-01-02,A,1\n").find("fixture.csv:1:") == 0);
    CHECK(validation_message(header + "2024-01-02,A\n").find("fixture.csv:2:") == 0);
    CHECK(validation_message(header + "2024-02-30,A,1\n").find("invalid ISO-8601 date") != std::string::npos);
    CHECK(validation_message(header + "02/01/2024,A,1\n").find("invalid ISO-8601 date") != std::string::npos);
    CHECK(validation_message(header + "2024-01-02,,1\n").find("empty asset_id") != std::string::npos);
    CHECK(validation_message(header + "2024-01-02,A,1,5\n").find("fixture.csv:2:") == 0);
    CHECK(validation_message(header + "2024-01-02,A,1.2.3\n").find("unparseable") != std::string::npos);
    CHECK(validation_message(header + "2024-01-02,A,nan\n").find("unparseable") != std::string::npos);
    CHECK(validation_message(header + "2024-01-02,A,1,5\n").size() > 0);
    CHECK(validation_message(header).find("no data rows") != std::string::npos);
    CHECK(validation_message("").find("empty file") != std::string::npos);
}

TEST_CASE("read_price_csv: byte order mark and blank lines are tolerated") {
    std::istringstream in("\xEF\xBB\xBF" "date,asset_id,adjusted_close\n\n2024-01-02,A,1.5\n");
    const auto p = read_price_csv(in);
    CHECK(p.adjusted_close(0, 0) == 1.5);
}

TEST_CASE("fetcher contract: recorded fixture passes validation") {
    const auto p = load_price_csv(kData + "/fetcher_contract.csv");
    CHECK(p.assets() == 2);
    CHECK(p.dates_count() == 5);
    CHECK(p.missing_cells() == 0);
    const std::string text = slurp(kData + "/fetcher_contract.csv");
    CHECK(text.rfind(std::string(kPriceHeader) + "\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 11);
}

TEST_CASE("to_returns: simple returns") {
    PricePanel p;
    p.adjusted_close.resize(2, 2);
    p.adjusted_close << 100.0, 5.0, 110.0, 5.0;
    p.asset_ids = {"A", "B"};
    p.dates = {"2024-01-02", "2024-01-03"};
    const auto r = to_returns(p);
    CHECK(r.periods() == 1);
    CHECK(r.returns(0, 0) == doctest::Approx(0.10));
    CHECK(r.returns(0, 1) == 0.0);
    CHECK(r.period_stamps == std::vector<std::string>{"2024-01-03"});
    CHECK(r.asset_ids == p.asset_ids);
}

TEST_CASE("to_returns: agrees with log-return compounding") {
    Rng rng(4);
    PricePanel p;
    p.adjusted_close = oracle::random_matrix(rng, 30, 4, 10.0, 20.0);
    p.asset_ids = {"A", "B", "C", "D"};
    for (int i = 0; i < 30; ++i) p.dates.push_back(synthetic_date(i));
    const auto r = to_returns(p);
    CHECK(r.periods() == 29);
    for (int t = 0; t < 29; ++t) {
        for (int j = 0; j < 4; ++j) {
            const double log_ret = std::log(p.adjusted_close(t + 1, j)) - std::log(p.adjusted_close(t, j));
            CHECK(r.returns(t, j) == doctest::Approx(std::expm1(log_ret)).epsilon(1e-12));
        }
    }
}

TEST_CASE("to_returns: errors") {
    PricePanel one;
    one.adjusted_close = Eigen::MatrixXd::Ones(1, 2);
    one.asset_ids = {"A", "B"};
    one.dates = {"2024-01-02"};
    CHECK_THROWS_AS(to_returns(one), InsufficientData);

    PricePanel gap = one;
    gap.adjusted_close = Eigen::MatrixXd::Ones(2, 2);
    gap.adjusted_close(1, 1) = std::nan("");
    gap.dates.push_back("2024-01-03");
    CHECK_THROWS_AS(to_returns(gap), ValidationError);
}

TEST_CASE("drop_incomplete_assets: complete panel is unchanged") {
    const auto p = load_price_csv(kData + "/prices_golden.csv");
    const auto [out, report] = drop_incomplete_assets(p, 0.9);
    CHECK(out.adjusted_close == p.adjusted_close);
    CHECK(report.assets_dropped.empty());
    CHECK(report.dates_dropped == 0);
    CHECK(report.assets_loaded == 3);
}

TEST_CASE("drop_incomplete_assets: report matches a brute-force recount") {
    const auto p = load_price_csv(kData + "/prices_gappy.csv");
    const double min_coverage = 0.8;
    const auto [out, report] = drop_incomplete_assets(p, min_coverage);

    std::vector<int> kept;
    for (int j = 0; j < p.assets(); ++j) {
        int seen = 0;
        for (int t = 0; t < p.dates_count(); ++t) seen += std::isnan(p.adjusted_close(t, j)) ? 0 : 1;
        if (static_cast<double>(seen) / p.dates_count() >= min_coverage) kept.push_back(j);
    }
    int complete_dates = 0;
    for (int t = 0; t < p.dates_count(); ++t) {
        bool ok = true;
        for (int j : kept) ok = ok && !std::isnan(p.adjusted_close(t, j));
        complete_dates += ok ? 1 : 0;
    }
    CHECK(report.assets_loaded == static_cast<int>(kept.size()));
    CHECK(report.assets_loaded + static_cast<int>(report.assets_dropped.size()) == p.assets());
    CHECK(report.periods == complete_dates);
    CHECK(report.dates_dropped == p.dates_count() - complete_dates);
    CHECK(report.missing_cells_before == p.missing_cells());
    CHECK(out.asset_ids == std::vector<std::string>{"AAA", "CCC"});
    CHECK(report.assets_dropped[0].asset_id == "BBB");
    CHECK(out.missing_cells() == 0);
    CHECK(std::find(out.dates.begin(), out.dates.end(), "2024-01-06") == out.dates.end());

    // At 0.9 both gappy assets go.
    CHECK(drop_incomplete_assets(p, 0.9).second.assets_dropped.size() == 2);
    CHECK_THROWS_AS(drop_incomplete_assets(p, 0.0), ValidationError);
    CHECK_THROWS_AS(drop_incomplete_assets(p, 1.5), ValidationError);
}

TEST_CASE("returns CSV: write then read round trip") {
    const auto prices = load_price_csv(kData + "/prices_golden.csv");
    const auto r = to_returns(prices);
    std::ostringstream out;
    write_returns_csv(r, out);
    CHECK(out.str().rfind(std::string(kReturnsHeader) + "\n", 0) == 0);
    std::istringstream in(out.str());
    const auto back = read_returns_csv(in);
    CHECK(back.returns == r.returns);
    CHECK(back.period_stamps == r.period_stamps);
    std::ostringstream again;
    write_returns_csv(back, again);
    CHECK(again.str() == out.str());

    std::istringstream holey("date,asset_id,return\n2024-01-02,A,0.1\n2024-01-02,B,0.2\n2024-01-03,A,0.1\n");
    CHECK_THROWS_AS(read_returns_csv(holey), ValidationError);
}

TEST_CASE("synthetic prices compound back to the same returns") {
    const auto r = isotropic_gaussian_panel(5, 40, 0.2, 0.01, 3);
    const auto prices = compound_prices(r);
    CHECK(prices.dates_count() == 41);
    const auto back = to_returns(prices);
    CHECK(oracle::max_abs(back.returns - r.returns) <= 1e-12);
    CHECK(back.period_stamps == r.period_stamps);
}
