#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace oscs {

std::string sha256_hex(const std::string& data);

// Reals are written with %.17g so repeated runs give identical bytes.
class CsvTable {
public:
    using Cell = std::variant<double, long, std::string>;

    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<Cell> row);
    std::string str() const;
    void write(const std::string& path) const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_real(double x);

void write_text_file(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& j);

// Library versions for the manifest.
nlohmann::json library_versions();

// matplotlib script reading the CSVs a subcommand wrote.
std::string plot_script(const std::string& subcommand);

}  // namespace oscs
