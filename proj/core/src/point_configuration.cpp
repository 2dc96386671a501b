#include "edgelab/point_configuration.hpp"

#include <algorithm>

namespace edgelab {

PointConfiguration make_configuration(std::vector<double> points, std::string source, double grid_step,
                                      double grid_length) {
    std::sort(points.begin(), points.end());
    PointConfiguration c;
    c.truncation.count = points.size();
    if (!points.empty()) c.truncation.last = points.back();
    if (points.size() >= 2) c.truncation.last_gap = points.back() - points[points.size() - 2];
    c.truncation.source = std::move(source);
    c.truncation.grid_step = grid_step;
    c.truncation.grid_length = grid_length;
    c.points = std::move(points);
    return c;
}

} // namespace edgelab
