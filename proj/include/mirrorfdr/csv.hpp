#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mirrorfdr {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    Eigen::Index ncols() const { return static_cast<Eigen::Index>(header.size()); }
    Eigen::Index nrows() const { return static_cast<Eigen::Index>(rows.size()); }
};

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Comma-separated, UTF-8, mandatory header, '.' decimal, numeric cells only.
// Errors name the offending row/column.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace mirrorfdr
