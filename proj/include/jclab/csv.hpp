#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace jclab {

/// Comma-separated output with a one-line header and every number printed
/// with a fixed count of significant digits.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header, int precision = 12);

    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

    std::size_t columns() const noexcept { return columns_; }

private:
    std::ofstream out_;
    std::size_t columns_;
    int precision_;
};

/// Value formatted as the writer does.
std::string format_number(double value, int precision);

}  // namespace jclab
