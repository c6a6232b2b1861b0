#pragma once

#include "hvis/mask.hpp"

namespace hvis {

// Real-valued box used by the tracker (detections carry sub-pixel boxes).
struct Box {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    double center_x() const { return 0.5 * (x_min + x_max); }
    double center_y() const { return 0.5 * (y_min + y_max); }
    bool valid() const { return x_min < x_max && y_min < y_max; }

    friend bool operator==(const Box&, const Box&) = default;
};

inline Box to_box(const BoundingBox& b) {
    return {static_cast<double>(b.x_min), static_cast<double>(b.y_min),
            static_cast<double>(b.x_max), static_cast<double>(b.y_max)};
}

double box_iou(const Box& a, const Box& b);

}  // namespace hvis
