#pragma once

// Canonical CSV contracts shared with the data fetcher.
//
//   prices:  date,asset_id,adjusted_close
//   returns: date,asset_id,return
//
// Long form, one observation per row, ISO-8601 dates, dot decimals, UTF-8,
// LF line endings. Canonical row order is (date, asset_id) ascending and
// numbers are written in shortest round-trip form; reading then writing a
// canonical file reproduces it byte for byte. A missing observation is an
// absent row.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "isocorr/panel.hpp"

namespace isocorr {

inline constexpr const char* kPriceHeader = "date,asset_id,adjusted_close";
inline constexpr const char* kReturnsHeader = "date,asset_id,return";

/// Adjusted closes, one row per date and one column per asset. Missing
/// observations are NaN. Dates strictly increase, asset ids are sorted.
struct PricePanel {
    Eigen::MatrixXd adjusted_close;
    std::vector<std::string> asset_ids;
    std::vector<std::string> dates;

    int dates_count() const { return static_cast<int>(adjusted_close.rows()); }
    int assets() const { return static_cast<int>(adjusted_close.cols()); }
    /// Number of NaN cells.
    long missing_cells() const;
};

struct DroppedAsset {
    std::string asset_id;
    std::string reason;
};

struct IngestReport {
    int assets_loaded = 0;
    std::vector<DroppedAsset> assets_dropped;
    int periods = 0;             // price dates kept
    int dates_dropped = 0;       // dates removed by complete-case filtering
    long missing_cells_before = 0;
    double min_coverage = 1.0;
    std::string policy;
};

/// Parses the canonical price CSV. Rows may come in any order. Throws
/// ValidationError (with the line number) on malformed rows, non-positive
/// prices or duplicate (date, asset) keys.
PricePanel read_price_csv(std::istream& in, const std::string& source = "<stream>");
/// Throws IoError when the file cannot be opened.
PricePanel load_price_csv(const std::filesystem::path& path);

void write_price_csv(const PricePanel& panel, std::ostream& out);

/// Returns CSV; every (date, asset) cell must be present.
ReturnsPanel read_returns_csv(std::istream& in, const std::string& source = "<stream>");
ReturnsPanel load_returns_csv(const std::filesystem::path& path);

void write_returns_csv(const ReturnsPanel& panel, std::ostream& out);

/// Simple returns P_t / P_{t-1} - 1, stamped with the later date. Requires a
/// complete panel with at least two dates.
ReturnsPanel to_returns(const PricePanel& prices);

/// Drops assets observed on fewer than min_coverage of the dates, then drops
/// every date on which a remaining asset is missing. Throws InsufficientData
/// if nothing survives.
std::pair<PricePanel, IngestReport> drop_incomplete_assets(const PricePanel& prices,
                                                           double min_coverage);

/// Loads either CSV flavour, chosen by the header line. Price files go
/// through drop_incomplete_assets(min_coverage) and to_returns.
ReturnsPanel load_returns_any(const std::filesystem::path& path, double min_coverage = 1.0);

}  // namespace isocorr
