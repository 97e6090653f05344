#include "fvar/csv.hpp"
#include "fvar/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>

namespace fvar {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_path_csv(std::ostream& out, const SampledPath& path, const std::string& value_header) {
    out << "x," << value_header << "\n";
    for (int i = path.lo(); i <= path.hi(); ++i)
        out << format_real(path.x_of(i)) << "," << format_real(path.at(i)) << "\n";
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

std::vector<std::pair<double, double>> read_xy_csv(std::istream& in) {
    std::vector<std::pair<double, double>> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw DomainError("csv: expected two comma-separated columns");
        if (first) {
            first = false;
            // Skip a header row if the first cell is not numeric.
            char* end = nullptr;
            std::strtod(line.c_str(), &end);
            if (end == line.c_str()) continue;
        }
        try {
            out.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DomainError("csv: cannot parse line '" + line + "'");
        }
    }
    return out;
}

} // namespace fvar
