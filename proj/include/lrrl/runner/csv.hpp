#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

namespace lrrl::runner {

// Shortest round-trip text for a double ("%.17g"); "nan"/"inf"/"-inf" for
// non-finite values.
std::string format_double(double value);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    CsvWriter& cell(const std::string& text);
    CsvWriter& cell(double value);
    CsvWriter& cell(std::size_t value);
    CsvWriter& cell(long long value);
    void end_row();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Throws std::out_of_range if the column is missing.
    std::size_t column(const std::string& name) const;
    std::vector<double> numeric_column(const std::string& name) const;
};

// Accepts subnormals, inf and nan; throws on trailing garbage.
double parse_double(const std::string& text);

CsvTable read_csv(const std::string& path);

}  // namespace lrrl::runner
