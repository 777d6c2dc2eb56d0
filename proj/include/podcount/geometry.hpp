#pragma once

#include <vector>

#include "podcount/image.hpp"
#include "podcount/types.hpp"

namespace podcount {

/// Intersection over union of two boxes. Symmetric, in [0,1]; degenerate
/// zero-area inputs give 0.
double box_iou(const Box& a, const Box& b);

/// |a AND b| / |a OR b|. Two empty masks give 0. Throws on size mismatch.
double mask_iou(const Mask& a, const Mask& b);

double polygon_area(const std::vector<Vec2>& poly);

/// Segment-pair test over non-adjacent edges. Shared endpoints of adjacent
/// edges do not count as intersections.
bool polygon_self_intersects(const std::vector<Vec2>& poly);

/// Validates InstanceAnnotation polygon invariants against image bounds.
/// Throws ValidationError naming `where` on failure.
void validate_polygon(const std::vector<Vec2>& poly, int width, int height,
                      const std::string& where);

/// Scanline even-odd fill: a pixel is set iff its center lies inside the
/// polygon. Centers exactly on an edge follow the half-open [enter, exit)
/// rule, so shared edges between adjacent polygons never double-fill.
/// Throws on degenerate polygons (< 3 vertices or zero area).
Mask rasterize(const std::vector<Vec2>& polygon, int width, int height);

inline Mask rasterize(const InstanceAnnotation& ann, int width, int height) {
    return rasterize(ann.polygon, width, height);
}

struct PixelRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0,x1) x [y0,y1)
    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    bool empty() const { return x1 <= x0 || y1 <= y0; }
};

/// Tight bounding rect of the set pixels; empty rect if none set.
PixelRect mask_bounds(const Mask& m);

/// Bounding rect of polygon vertices clipped to the image, in whole pixels.
PixelRect polygon_pixel_bounds(const std::vector<Vec2>& poly, int width, int height);

}  // namespace podcount
