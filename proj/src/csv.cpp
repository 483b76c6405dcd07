#include "mirrorfdr/csv.hpp"

#include <fstream>
#include <sstream>

namespace mirrorfdr {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open file: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty file (header row required): " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_line(line);
    if (table.header.empty()) throw CsvError("empty header row: " + path);

    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != table.header.size())
            throw CsvError("row " + std::to_string(row) + ": expected " +
                           std::to_string(table.header.size()) + " columns, got " +
                           std::to_string(cells.size()));
        std::vector<double> vals(cells.size());
        for (size_t c = 0; c < cells.size(); ++c) {
            try {
                size_t used = 0;
                vals[c] = std::stod(cells[c], &used);
                if (used != cells[c].size()) throw std::invalid_argument("trailing chars");
            } catch (const std::exception&) {
                throw CsvError("row " + std::to_string(row) + ", column '" +
                               table.header[c] + "': not a number: '" + cells[c] + "'");
            }
        }
        table.rows.push_back(std::move(vals));
    }
    return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write file: " + path);
    for (size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? ',' : '\n');
    for (const auto& row : rows)
        for (size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? ',' : '\n');
}

}  // namespace mirrorfdr
