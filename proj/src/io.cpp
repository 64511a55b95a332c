#include "gedsv/io.hpp"

#include "gedsv/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace gedsv {

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, delimiter)) fields.push_back(field);
    if (!line.empty() && line.back() == delimiter) fields.emplace_back();
    return fields;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return i;
    }
    throw InputError("column '" + name + "' not found in header", 1);
}

double parse_number(const std::string& raw, std::size_t line) {
    const std::string text = trim(raw);
    if (text.empty() || text == "NA" || text == "NaN" || text == "nan" || text == ".") {
        throw InputError("missing value", line);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw InputError("cannot parse number '" + text + "'", line);
    }
    return value;
}

}  // namespace

void ColumnMapping::validate() const {
    if (price.has_value() == returns.has_value()) {
        throw InputError("select exactly one of a price column or a return column");
    }
}

IngestResult ingest(std::istream& in, const ColumnMapping& mapping) {
    mapping.validate();
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty input: a header row is required", 1);
    const std::vector<std::string> header = split(line, mapping.delimiter);
    const std::size_t value_col = column_index(header, mapping.price ? *mapping.price : *mapping.returns);
    std::optional<std::size_t> date_col;
    if (mapping.date) date_col = column_index(header, *mapping.date);

    std::vector<double> values;
    std::vector<std::string> dates;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split(line, mapping.delimiter);
        if (value_col >= fields.size() || (date_col && *date_col >= fields.size())) {
            throw InputError("row has too few fields", line_no);
        }
        const double v = parse_number(fields[value_col], line_no);
        if (mapping.price && !(v > 0.0)) throw InputError("non-positive price", line_no);
        values.push_back(v);
        if (date_col) dates.push_back(trim(fields[*date_col]));
    }

    IngestResult out;
    std::vector<double> returns;
    if (mapping.price) {
        if (values.size() < 2) throw InputError("need at least two prices to form a return");
        returns.reserve(values.size() - 1);
        for (std::size_t t = 1; t < values.size(); ++t) returns.push_back(100.0 * std::log(values[t] / values[t - 1]));
        if (date_col) dates.erase(dates.begin());
    } else {
        if (values.empty()) throw InputError("no return rows");
        returns = std::move(values);
    }
    out.series = mapping.center ? ReturnSeries::centered_from(std::move(returns))
                                : ReturnSeries::from_values(std::move(returns));
    out.dates = std::move(dates);
    return out;
}

IngestResult ingest(const std::filesystem::path& path, const ColumnMapping& mapping) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return ingest(in, mapping);
}

std::string format_number(double value) {
    if (std::isnan(value)) return "NA";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

}  // namespace gedsv
