#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chronicle/series.hpp"

namespace chronicle {

/// A set of series restricted to a shared grid with every gap resolved:
/// after alignment no column contains a missing sample.
struct AlignedPanel {
    std::vector<std::string> labels;
    double start = 0.0;
    double step = 1.0;
    std::size_t length = 0;
    std::vector<std::vector<double>> columns;  // one per label, all of size length

    double time_at(std::size_t i) const { return start + static_cast<double>(i) * step; }

    // View of one column as a Chronicle on the panel grid.
    Chronicle column_series(std::size_t c) const;
};

/// Restricts the input series to their maximal common time span, forward-fills
/// missing samples inside it (drawing on earlier values when available), and
/// trims leading positions that no fill can reach.
AlignedPanel align(const std::vector<Chronicle>& series);

}  // namespace chronicle
