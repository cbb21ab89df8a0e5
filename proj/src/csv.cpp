#include "jclab/csv.hpp"

#include <cmath>

#include <fmt/format.h>

#include "jclab/errors.hpp"

namespace jclab {

std::string format_number(double value, int precision)
{
    if (std::isnan(value))
        return "nan";
    if (value == 0.0)
        value = 0.0;  // drop the sign of negative zero
    return fmt::format("{:.{}g}", value, precision);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header, int precision)
    : out_(path), columns_(header.size()), precision_(precision)
{
    if (!out_)
        throw ConfigError("cannot open '" + path.string() + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> values)
{
    if (values.size() != columns_)
        throw DomainError("csv row has " + std::to_string(values.size()) + " values, header has "
                          + std::to_string(columns_));
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            line += ',';
        line += format_number(values[i], precision_);
    }
    line += '\n';
    out_ << line;
    if (!out_)
        throw Error("write failed");
}

}  // namespace jclab
