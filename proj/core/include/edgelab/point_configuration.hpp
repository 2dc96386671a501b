#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace edgelab {

/// Bookkeeping for a finite prefix of an infinite point configuration.
struct Truncation {
    std::size_t count = 0;
    /// Largest retained point.
    double last = 0.0;
    /// Gap between the two largest retained points, used for tail bounds.
    double last_gap = 0.0;
    std::string source;
    double grid_step = 0.0;
    double grid_length = 0.0;
};

/// Ascending points of a (truncated) configuration on the real line.
struct PointConfiguration {
    std::vector<double> points;
    Truncation truncation;
};

/// Sorts the points and fills in the truncation record.
PointConfiguration make_configuration(std::vector<double> points, std::string source = {},
                                      double grid_step = 0.0, double grid_length = 0.0);

} // namespace edgelab
