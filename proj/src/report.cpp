#include "qlpde/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "qlpde/types.hpp"

namespace qlpde {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t j = 0; j < header.size(); ++j) body_ += (j ? "," : "") + header[j];
    body_ += '\n';
}

void CsvTable::add_row(std::span<const double> values) {
    if (values.size() != columns_) throw Error("csv row has the wrong number of columns");
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (j) body_ += ',';
        body_ += format_double(values[j]);
    }
    body_ += '\n';
    ++rows_;
}

std::string CsvTable::str() const { return body_; }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_file(path, doc.dump(2) + "\n"); }

std::string plot_data(std::span<const double> x, std::span<const double> y) {
    std::string out;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) out += format_double(x[i]) + ' ' + format_double(y[i]) + '\n';
    return out;
}

}  // namespace qlpde
