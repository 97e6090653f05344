#pragma once

#include "fvar/grid.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace fvar {

/// 17 significant digits, '.' decimal separator, locale-independent.
std::string format_real(double v);

/// Header row plus (node x, value) lines, LF endings.
void write_path_csv(std::ostream& out, const SampledPath& path,
                    const std::string& value_header = "value");

/// Generic CSV table; cells are written verbatim.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

/// Parse a two-column CSV (as written by write_path_csv) into value pairs.
std::vector<std::pair<double, double>> read_xy_csv(std::istream& in);

} // namespace fvar
