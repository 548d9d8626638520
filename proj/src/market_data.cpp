#include "isocorr/market_data.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string_view>

#include "isocorr/error.hpp"
#include "isocorr/format.hpp"

namespace isocorr {

namespace {

struct Observation {
    std::string date;
    std::string asset;
    double value = 0.0;
    long line = 0;
};

struct LongTable {
    std::vector<std::string> dates;
    std::vector<std::string> assets;
    Eigen::MatrixXd values;  // dates x assets, NaN where absent
};

bool is_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        return false;
    }
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (s[i] < '0' || s[i] > '9') {
            return false;
        }
    }
    const int y = std::stoi(std::string(s.substr(0, 4)));
    const unsigned m = static_cast<unsigned>(std::stoi(std::string(s.substr(5, 2))));
    const unsigned d = static_cast<unsigned>(std::stoi(std::string(s.substr(8, 2))));
    return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                       std::chrono::day{d}}
        .ok();
}

[[noreturn]] void fail(const std::string& source, long line, const std::string& what) {
    throw ValidationError(source + ":" + std::to_string(line) + ": " + what);
}

LongTable read_long_table(std::istream& in, const std::string& source, std::string_view header,
                          bool positive_only) {
    std::string text;
    long line_no = 0;
    auto next_line = [&](std::string& out) {
        if (!std::getline(in, out)) {
            return false;
        }
        ++line_no;
        if (!out.empty() && out.back() == '\r') {
            out.pop_back();
        }
        return true;
    };

    if (!next_line(text)) {
        fail(source, 1, "empty file, expected header '" + std::string(header) + "'");
    }
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        text.erase(0, 3);
    }
    if (text != header) {
        fail(source, line_no, "bad header '" + text + "', expected '" + std::string(header) + "'");
    }

    std::vector<Observation> rows;
    while (next_line(text)) {
        if (text.empty()) {
            continue;
        }
        const auto c1 = text.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(',', c1 + 1);
        if (c2 == std::string::npos || text.find(',', c2 + 1) != std::string::npos) {
            fail(source, line_no, "expected 3 comma-separated fields");
        }
        Observation obs;
        obs.line = line_no;
        obs.date = text.substr(0, c1);
        obs.asset = text.substr(c1 + 1, c2 - c1 - 1);
        const std::string_view value(text.data() + c2 + 1, text.size() - c2 - 1);
        if (!is_iso_date(obs.date)) {
            fail(source, line_no, "invalid ISO-8601 date '" + obs.date + "'");
        }
        if (obs.asset.empty()) {
            fail(source, line_no, "empty asset_id");
        }
        if (!parse_double(value, obs.value) || !std::isfinite(obs.value)) {
            fail(source, line_no, "unparseable value '" + std::string(value) + "'");
        }
        if (positive_only && !(obs.value > 0.0)) {
            fail(source, line_no, "non-positive price " + std::string(value) + " for " + obs.asset +
                                      " on " + obs.date);
        }
        rows.push_back(std::move(obs));
    }
    if (rows.empty()) {
        fail(source, line_no, "no data rows");
    }

    LongTable table;
    for (const auto& r : rows) {
        table.dates.push_back(r.date);
        table.assets.push_back(r.asset);
    }
    for (auto* v : {&table.dates, &table.assets}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    auto index_of = [](const std::vector<std::string>& v, const std::string& key) {
        return static_cast<Eigen::Index>(std::lower_bound(v.begin(), v.end(), key) - v.begin());
    };

    table.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(table.dates.size()),
                                             static_cast<Eigen::Index>(table.assets.size()),
                                             std::numeric_limits<double>::quiet_NaN());
    std::map<std::pair<Eigen::Index, Eigen::Index>, long> seen;
    for (const auto& r : rows) {
        const auto key = std::make_pair(index_of(table.dates, r.date), index_of(table.assets, r.asset));
        const auto [it, inserted] = seen.emplace(key, r.line);
        if (!inserted) {
            fail(source, r.line, "duplicate (" + r.date + ", " + r.asset + "), first seen on line " +
                                     std::to_string(it->second));
        }
        table.values(key.first, key.second) = r.value;
    }
    return table;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return in;
}

void write_long(std::ostream& out, const char* header, const std::vector<std::string>& dates,
                const std::vector<std::string>& assets, const Eigen::MatrixXd& values) {
    out << header << '\n';
    for (Eigen::Index t = 0; t < values.rows(); ++t) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            const double v = values(t, j);
            if (std::isnan(v)) {
                continue;
            }
            out << dates[static_cast<std::size_t>(t)] << ',' << assets[static_cast<std::size_t>(j)]
                << ',' << format_double(v) << '\n';
        }
    }
}

}  // namespace

long PricePanel::missing_cells() const {
    return static_cast<long>(adjusted_close.array().isNaN().count());
}

PricePanel read_price_csv(std::istream& in, const std::string& source) {
    LongTable table = read_long_table(in, source, kPriceHeader, true);
    return PricePanel{std::move(table.values), std::move(table.assets), std::move(table.dates)};
}

PricePanel load_price_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return read_price_csv(in, path.string());
}

void write_price_csv(const PricePanel& panel, std::ostream& out) {
    write_long(out, kPriceHeader, panel.dates, panel.asset_ids, panel.adjusted_close);
}

ReturnsPanel read_returns_csv(std::istream& in, const std::string& source) {
    LongTable table = read_long_table(in, source, kReturnsHeader, false);
    const auto missing = table.values.array().isNaN().count();
    if (missing > 0) {
        throw ValidationError(source + ": returns panel has " + std::to_string(missing) +
                              " missing (date, asset) cells");
    }
    ReturnsPanel panel{std::move(table.values), std::move(table.assets), std::move(table.dates)};
    panel.validate();
    return panel;
}

ReturnsPanel load_returns_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return read_returns_csv(in, path.string());
}

void write_returns_csv(const ReturnsPanel& panel, std::ostream& out) {
    panel.validate();
    write_long(out, kReturnsHeader, panel.period_stamps, panel.asset_ids, panel.returns);
}

ReturnsPanel to_returns(const PricePanel& prices) {
    if (prices.dates_count() < 2) {
        throw InsufficientData("to_returns: need at least 2 price dates, got " +
                               std::to_string(prices.dates_count()));
    }
    if (prices.missing_cells() > 0) {
        throw ValidationError("to_returns: price panel has " + std::to_string(prices.missing_cells()) +
                              " missing cells; run drop_incomplete_assets first");
    }
    if (!(prices.adjusted_close.array() > 0.0).all()) {
        throw ValidationError("to_returns: prices must be positive");
    }
    const Eigen::Index t = prices.adjusted_close.rows() - 1;
    ReturnsPanel out;
    out.returns = prices.adjusted_close.bottomRows(t).cwiseQuotient(prices.adjusted_close.topRows(t));
    out.returns.array() -= 1.0;
    out.asset_ids = prices.asset_ids;
    out.period_stamps.assign(prices.dates.begin() + 1, prices.dates.end());
    return out;
}

std::pair<PricePanel, IngestReport> drop_incomplete_assets(const PricePanel& prices,
                                                           double min_coverage) {
    if (!(min_coverage > 0.0) || min_coverage > 1.0) {
        throw ValidationError("drop_incomplete_assets: min_coverage must lie in (0, 1]");
    }
    IngestReport report;
    report.min_coverage = min_coverage;
    report.missing_cells_before = prices.missing_cells();
    report.policy = "drop assets with coverage < min_coverage, then drop dates with any missing cell";

    const double dates = prices.dates_count();
    std::vector<Eigen::Index> keep_cols;
    for (Eigen::Index j = 0; j < prices.adjusted_close.cols(); ++j) {
        const auto observed = (!prices.adjusted_close.col(j).array().isNaN()).count();
        const double coverage = dates > 0 ? observed / dates : 0.0;
        if (coverage < min_coverage) {
            report.assets_dropped.push_back(
                {prices.asset_ids[static_cast<std::size_t>(j)],
                 "coverage " + format_double(coverage) + " below " + format_double(min_coverage)});
        } else {
            keep_cols.push_back(j);
        }
    }

    std::vector<Eigen::Index> keep_rows;
    for (Eigen::Index t = 0; t < prices.adjusted_close.rows(); ++t) {
        bool complete = true;
        for (auto j : keep_cols) {
            if (std::isnan(prices.adjusted_close(t, j))) {
                complete = false;
                break;
            }
        }
        if (complete) {
            keep_rows.push_back(t);
        }
    }
    report.dates_dropped = static_cast<int>(prices.adjusted_close.rows()) - static_cast<int>(keep_rows.size());

    if (keep_cols.empty() || keep_rows.empty()) {
        throw InsufficientData("drop_incomplete_assets: no complete data left (" +
                               std::to_string(keep_cols.size()) + " assets, " +
                               std::to_string(keep_rows.size()) + " dates)");
    }

    PricePanel out;
    out.adjusted_close = prices.adjusted_close(keep_rows, keep_cols);
    for (auto j : keep_cols) {
        out.asset_ids.push_back(prices.asset_ids[static_cast<std::size_t>(j)]);
    }
    for (auto t : keep_rows) {
        out.dates.push_back(prices.dates[static_cast<std::size_t>(t)]);
    }
    report.assets_loaded = static_cast<int>(keep_cols.size());
    report.periods = static_cast<int>(keep_rows.size());
    return {std::move(out), std::move(report)};
}

ReturnsPanel load_returns_any(const std::filesystem::path& path, double min_coverage) {
    auto in = open_or_throw(path);
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') {
        header.pop_back();
    }
    in.clear();
    in.seekg(0);
    if (header.find(kReturnsHeader) != std::string::npos) {
        return read_returns_csv(in, path.string());
    }
    const PricePanel prices = read_price_csv(in, path.string());
    return to_returns(drop_incomplete_assets(prices, min_coverage).first);
}

}  // namespace isocorr
