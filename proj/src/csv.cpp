#include "dino/csv.hpp"

#include "dino/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dino::csv
{
std::vector<double> Table::column(std::size_t index) const
{
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto &row : rows)
    {
        if (index >= row.size())
        {
            throw ValidationError("csv: missing column " + std::to_string(index));
        }
        values.push_back(row[index]);
    }
    return values;
}

Table read_table(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ValidationError("csv: cannot open " + path.string());
    }
    Table table;
    std::string line;
    if (!std::getline(in, line))
    {
        throw ValidationError("csv: empty file " + path.string());
    }
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
        {
            table.header.push_back(field);
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty())
        {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
        {
            try
            {
                row.push_back(std::stod(field));
            }
            catch (const std::exception &)
            {
                throw ValidationError("csv: non-numeric value '" + field + "' at " + path.string() +
                                      ":" + std::to_string(line_no));
            }
        }
        if (row.size() != table.header.size())
        {
            throw ValidationError("csv: column count mismatch at " + path.string() + ":" +
                                  std::to_string(line_no));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content)
{
    if (path.has_parent_path())
    {
        std::filesystem::create_directories(path.parent_path());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out)
        {
            throw ValidationError("cannot open for writing: " + tmp.string());
        }
        out << content;
        if (!out)
        {
            throw ValidationError("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace dino::csv
