#include "podcount/types.hpp"

#include <algorithm>
#include <cmath>

namespace podcount {

Box Box::clipped(double cx, double cy, double w, double h) {
    if (!(std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h))) {
        throw ValidationError("box has non-finite coordinates");
    }
    if (w <= 0.0 || h <= 0.0) {
        throw ValidationError("box must have positive extent");
    }
    if (cx < 0.0 || cx > 1.0 || cy < 0.0 || cy > 1.0) {
        throw ValidationError("box center outside unit image");
    }
    const double x0 = std::max(0.0, cx - 0.5 * w);
    const double y0 = std::max(0.0, cy - 0.5 * h);
    const double x1 = std::min(1.0, cx + 0.5 * w);
    const double y1 = std::min(1.0, cy + 0.5 * h);
    if (x1 <= x0 || y1 <= y0) {
        throw ValidationError("box clipped to zero area");
    }
    Box b;
    b.cx = 0.5 * (x0 + x1);
    b.cy = 0.5 * (y0 + y1);
    b.w = x1 - x0;
    b.h = y1 - y0;
    return b;
}

bool is_valid_box(const Box& b) {
    return std::isfinite(b.cx) && std::isfinite(b.cy) && std::isfinite(b.w) && std::isfinite(b.h) &&
           b.cx >= 0.0 && b.cx <= 1.0 && b.cy >= 0.0 && b.cy <= 1.0 &&
           b.w > 0.0 && b.w <= 1.0 && b.h > 0.0 && b.h <= 1.0 &&
           b.x0() >= -1e-12 && b.y0() >= -1e-12 && b.x1() <= 1.0 + 1e-12 && b.y1() <= 1.0 + 1e-12;
}

const char* domain_name(Domain d) {
    return d == Domain::source ? "source" : "target";
}

CountResult count_from_detections(const std::vector<Detection>& dets) {
    CountResult r;
    r.pod_count = static_cast<int>(dets.size());
    for (const auto& d : dets) r.seed_count += d.spp.value();
    return r;
}

}  // namespace podcount
