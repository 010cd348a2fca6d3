#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kbound {

/// 12 significant digits, '.' separator, shortest exponent form from to_chars.
std::string format_number(double v);
std::string format_number(std::int64_t v);
std::string format_number(std::uint64_t v);
inline std::string format_number(int v) { return format_number(static_cast<std::int64_t>(v)); }

/// Header row, rows of preformatted cells, optional leading '#' comment lines.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void comment(std::string line) { comments_.push_back(std::move(line)); }
    void add_row(std::vector<std::string> cells);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }

    /// LF line endings throughout.
    std::string str() const;

private:
    std::vector<std::string> comments_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace kbound
