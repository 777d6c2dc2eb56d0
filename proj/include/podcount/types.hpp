#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace podcount {

/// Raised when an input file or value violates a schema or invariant.
/// The CLI maps this to exit code 1; all other exceptions map to 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Seed-count category of a pod. Valid values are 1..4 ("1spp".."4spp").
class SppClass {
public:
    static constexpr int kMin = 1;
    static constexpr int kMax = 4;

    explicit SppClass(int value) : value_(value) {
        if (value < kMin || value > kMax) {
            throw ValidationError("spp class must be in [1,4], got " + std::to_string(value));
        }
    }

    int value() const { return value_; }

    bool operator==(const SppClass& o) const { return value_ == o.value_; }
    bool operator!=(const SppClass& o) const { return value_ != o.value_; }

private:
    int value_;
};

/// Axis-aligned box in normalized image coordinates, center-size convention.
struct Box {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    /// Builds a box whose extent is clipped to the unit image. Throws if the
    /// clipped box has no area or the center is outside [0,1].
    static Box clipped(double cx, double cy, double w, double h);

    double x0() const { return cx - 0.5 * w; }
    double y0() const { return cy - 0.5 * h; }
    double x1() const { return cx + 0.5 * w; }
    double y1() const { return cy + 0.5 * h; }
    double area() const { return w * h; }
};

bool is_valid_box(const Box& b);

struct Detection {
    Box box;
    SppClass spp;
    double confidence = 0.0;  // in [0,1]
};

/// 2-D point. Pixel coordinates unless a context says normalized.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Polygon instance label, vertices in pixel coordinates of the source image.
struct InstanceAnnotation {
    std::vector<Vec2> polygon;
    SppClass spp;
};

enum class Domain { source, target };

const char* domain_name(Domain d);

/// One annotated image. Exactly one of `detections` / `instances` is
/// populated depending on the dataset kind.
struct ImageRecord {
    std::string image_id;
    std::string path;
    int width = 0;
    int height = 0;
    Domain domain = Domain::source;
    std::vector<Detection> detections;
    std::vector<InstanceAnnotation> instances;
};

struct CountResult {
    int pod_count = 0;
    int seed_count = 0;

    CountResult& operator+=(const CountResult& o) {
        pod_count += o.pod_count;
        seed_count += o.seed_count;
        return *this;
    }
    bool operator==(const CountResult& o) const {
        return pod_count == o.pod_count && seed_count == o.seed_count;
    }
};

/// pod_count = |dets|, seed_count = sum of spp values.
CountResult count_from_detections(const std::vector<Detection>& dets);

}  // namespace podcount
