#include "podcount/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace podcount {

double box_iou(const Box& a, const Box& b) {
    const double iw = std::min(a.x1(), b.x1()) - std::max(a.x0(), b.x0());
    const double ih = std::min(a.y1(), b.y1()) - std::max(a.y0(), b.y0());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    const double iou = inter / uni;
    return std::clamp(iou, 0.0, 1.0);
}

double mask_iou(const Mask& a, const Mask& b) {
    if (!a.same_size(b)) {
        throw ValidationError("mask_iou: dimension mismatch");
    }
    std::int64_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const bool va = a.data[i] != 0;
        const bool vb = b.data[i] != 0;
        inter += (va && vb);
        uni += (va || vb);
    }
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(a);
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, q.x) - 1e-12 <= r.x && r.x <= std::max(p.x, q.x) + 1e-12 &&
           std::min(p.y, q.y) - 1e-12 <= r.y && r.y <= std::max(p.y, q.y) + 1e-12;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

}  // namespace

bool polygon_self_intersects(const std::vector<Vec2>& poly) {
    const std::size_t n = poly.size();
    if (n < 4) return false;  // a triangle cannot self-intersect
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (they share a vertex by construction)
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n],
                                   poly[j], poly[(j + 1) % n])) {
                return true;
            }
        }
    }
    return false;
}

void validate_polygon(const std::vector<Vec2>& poly, int width, int height,
                      const std::string& where) {
    if (poly.size() < 3) {
        throw ValidationError(where + ": polygon needs at least 3 vertices");
    }
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& v = poly[i];
        if (!(std::isfinite(v.x) && std::isfinite(v.y))) {
            throw ValidationError(where + ": non-finite vertex " + std::to_string(i));
        }
        if (v.x < 0.0 || v.x > width || v.y < 0.0 || v.y > height) {
            throw ValidationError(where + ": vertex " + std::to_string(i) + " outside image bounds");
        }
        const Vec2& w = poly[(i + 1) % poly.size()];
        if (v.x == w.x && v.y == w.y) {
            throw ValidationError(where + ": duplicate consecutive vertex " + std::to_string(i));
        }
    }
    if (polygon_area(poly) <= 0.0) {
        throw ValidationError(where + ": polygon has zero area");
    }
    if (polygon_self_intersects(poly)) {
        throw ValidationError(where + ": polygon self-intersects");
    }
}

Mask rasterize(const std::vector<Vec2>& polygon, int width, int height) {
    if (polygon.size() < 3 || polygon_area(polygon) <= 0.0) {
        throw ValidationError("rasterize: degenerate polygon");
    }
    Mask mask(width, height);
    const std::size_t n = polygon.size();
    std::vector<double> xs;
    xs.reserve(8);
    for (int y = 0; y < height; ++y) {
        const double yc = y + 0.5;
        xs.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& p = polygon[i];
            const Vec2& q = polygon[(i + 1) % n];
            if (p.y == q.y) continue;  // horizontal edge
            // half-open vertex rule: count iff yc in [min, max)
            if ((p.y <= yc && yc < q.y) || (q.y <= yc && yc < p.y)) {
                xs.push_back(p.x + (yc - p.y) * (q.x - p.x) / (q.y - p.y));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            // pixel centers in [enter, exit)
            int x_first = static_cast<int>(std::ceil(xs[k] - 0.5));
            int x_last = static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1;
            x_first = std::max(x_first, 0);
            x_last = std::min(x_last, width - 1);
            for (int x = x_first; x <= x_last; ++x) mask.set(x, y);
        }
    }
    return mask;
}

PixelRect mask_bounds(const Mask& m) {
    PixelRect r{m.width, m.height, 0, 0};
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (m.at(x, y)) {
                r.x0 = std::min(r.x0, x);
                r.y0 = std::min(r.y0, y);
                r.x1 = std::max(r.x1, x + 1);
                r.y1 = std::max(r.y1, y + 1);
            }
        }
    }
    if (r.x1 <= r.x0) return PixelRect{};
    return r;
}

PixelRect polygon_pixel_bounds(const std::vector<Vec2>& poly, int width, int height) {
    double x0 = poly[0].x, y0 = poly[0].y, x1 = poly[0].x, y1 = poly[0].y;
    for (const auto& v : poly) {
        x0 = std::min(x0, v.x);
        y0 = std::min(y0, v.y);
        x1 = std::max(x1, v.x);
        y1 = std::max(y1, v.y);
    }
    PixelRect r;
    r.x0 = std::max(0, static_cast<int>(std::floor(x0)));
    r.y0 = std::max(0, static_cast<int>(std::floor(y0)));
    r.x1 = std::min(width, static_cast<int>(std::ceil(x1)));
    r.y1 = std::min(height, static_cast<int>(std::ceil(y1)));
    if (r.x1 < r.x0) r.x1 = r.x0;
    if (r.y1 < r.y0) r.y1 = r.y0;
    return r;
}

}  // namespace podcount
