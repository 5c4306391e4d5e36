#ifndef DINO_CSV_HPP
#define DINO_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace dino::csv
{
struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(std::size_t index) const;
};

// Reads a numeric CSV with a mandatory header line.
Table read_table(const std::filesystem::path &path);

// Writes content to path atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

} // namespace dino::csv

#endif // DINO_CSV_HPP
