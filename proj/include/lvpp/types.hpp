#pragma once

#include <functional>

namespace lvpp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Scalar field on the plane.
using PointFn = std::function<double(double, double)>;

} // namespace lvpp
