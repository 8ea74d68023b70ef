#pragma once

// Minimal CSV emission helpers.  Numbers are rendered with %.17g so a
// round-trip through text preserves the double exactly.

#include <cstdio>
#include <string>
#include <vector>

namespace qmet {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_join(const std::vector<std::string>& cells) {
    std::string row;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    row += '\n';
    return row;
}

}  // namespace qmet
