#pragma once

#include <cstdint>
#include <vector>

namespace podcount {

/// Interleaved row-major 8-bit image. channels is 1 (gray), 3 (RGB) or
/// 4 (RGBA, alpha last).
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    ImageU8() = default;
    ImageU8(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    bool empty() const { return data.empty(); }

    std::uint8_t* pixel(int x, int y) {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * channels;
    }
    const std::uint8_t* pixel(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * channels;
    }

    bool operator==(const ImageU8& o) const {
        return width == o.width && height == o.height && channels == o.channels && data == o.data;
    }
};

/// Binary raster mask, one byte per pixel (0 or 1).
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Mask() = default;
    Mask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    void set(int x, int y, std::uint8_t v = 1) {
        data[static_cast<std::size_t>(y) * width + x] = v;
    }

    std::int64_t count_set() const {
        std::int64_t n = 0;
        for (auto v : data) n += (v != 0);
        return n;
    }
    bool same_size(const Mask& o) const { return width == o.width && height == o.height; }

    bool operator==(const Mask& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

}  // namespace podcount
