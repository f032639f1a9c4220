#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace shearlab::csv {

/// Shortest decimal representation that round-trips to the same double.
std::string format(double v);
std::string format(long long v);

class Table {
public:
    explicit Table(std::vector<std::string> header);

    const std::vector<std::string>& header() const noexcept { return header_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
    /// Throws InvalidArgument when the cell count does not match the header.
    void add_row(std::vector<std::string> cells);
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);
void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

}  // namespace shearlab::csv
