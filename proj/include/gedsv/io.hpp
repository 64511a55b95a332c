#pragma once

#include "gedsv/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gedsv {

/// Which columns of a delimited file hold the data. Exactly one of price and
/// returns must be set.
struct ColumnMapping {
    std::optional<std::string> date;
    std::optional<std::string> price;
    std::optional<std::string> returns;
    char delimiter = ',';
    bool center = true;

    void validate() const;
};

struct IngestResult {
    ReturnSeries series;
    /// Date label of each return, when a date column was mapped.
    std::vector<std::string> dates;
};

/// Reads a header-led delimited table. Prices become 100 ln(P_t / P_{t-1});
/// consecutive rows are treated as adjacent. Throws InputError with the line number.
IngestResult ingest(std::istream& in, const ColumnMapping& mapping);
IngestResult ingest(const std::filesystem::path& path, const ColumnMapping& mapping);

/// Text with 17 significant digits; NA for NaN.
std::string format_number(double value);

}  // namespace gedsv
