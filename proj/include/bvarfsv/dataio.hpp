#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bvarfsv {

struct ScaleInfo {
    double mean = 0.0;
    double sd = 1.0;
};

// Quarterly panel: rows in chronological order, one named series per column.
// tcodes hold the stationarity transform for each column; scale is filled in
// by standardize.
struct Panel {
    std::vector<std::string> dates;
    std::vector<std::string> names;
    Eigen::MatrixXd values; // T x m
    std::vector<int> tcodes;
    std::vector<ScaleInfo> scale;
};

// CSV with a date column (YYYY:Qn or ISO) and named series. Transform codes
// come from a second header row unless a sidecar file with name,code lines is
// given. Rows must be strictly increasing in time and every cell numeric.
Panel load_panel(const std::string& path, const std::string& tcode_sidecar = "");

// Stationarity transforms 1..7: level, difference, second difference, log,
// log difference, second log difference, and the change in the period growth
// rate. Entries the differencing leaves undefined come back as NaN.
Eigen::VectorXd apply_transform(const Eigen::VectorXd& series, int tcode, const std::string& name);

// number of leading undefined entries a code introduces
Eigen::Index transform_leading(int tcode);

// Apply every column's code and drop the shared leading rows left undefined,
// keeping the panel rectangular.
Panel transform_panel(const Panel& raw);

// z-score each column in place (zero mean, unit variance) and record the
// scales used
void standardize(Panel& p);

// undo the standardization on model-scale values such as forecasts
Eigen::MatrixXd back_transform(const Eigen::MatrixXd& z, const std::vector<ScaleInfo>& scale);

// Write the panel back as CSV at 15 significant digits, with the transform
// row included when codes are present.
void write_panel(const std::string& path, const Panel& p);

} // namespace bvarfsv
