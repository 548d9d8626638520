#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace isocorr {

/// T x N matrix of per-period simple returns. Column j belongs to
/// asset_ids[j], row t to period_stamps[t]. Columns are contiguous in memory.
struct ReturnsPanel {
    Eigen::MatrixXd returns;
    std::vector<std::string> asset_ids;
    std::vector<std::string> period_stamps;

    int periods() const { return static_cast<int>(returns.rows()); }
    int assets() const { return static_cast<int>(returns.cols()); }

    /// Throws ValidationError on shape mismatch or non-finite cells.
    void validate() const;
};

}  // namespace isocorr
