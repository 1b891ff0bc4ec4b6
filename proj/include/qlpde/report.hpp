#pragma once

#include <filesystem>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

namespace qlpde {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// JSON value for a double; non-finite values become the strings above.
nlohmann::json json_number(double v);

/// Comma-separated table with a one-line header.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::span<const double> values);
    std::size_t rows() const { return rows_; }
    std::string str() const;

private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string body_;
};

/// Writes `text` to `path`, creating parent directories. Throws ConfigError.
void write_file(const std::filesystem::path& path, const std::string& text);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Two whitespace-separated columns per line.
std::string plot_data(std::span<const double> x, std::span<const double> y);

}  // namespace qlpde
