#pragma once

#include <cstdint>
#include <vector>

namespace podcount::da {

/// Dense double tensor, row-major. Shapes used here are small: [n] vectors,
/// [m,n] matrices, [C,H,W] feature maps.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;

    static Tensor zeros(std::vector<int> shape);
    static Tensor full(std::vector<int> shape, double v);
    static Tensor scalar(double v);
    static Tensor from_vector(std::vector<double> v);

    std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
    int ndim() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    // [C,H,W] accessors
    double& at3(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * dim(1) + y) * dim(2) + x];
    }
    double at3(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * dim(1) + y) * dim(2) + x];
    }
    // [m,n] accessors
    double& at2(int r, int c) { return data[static_cast<std::size_t>(r) * dim(1) + c]; }
    double at2(int r, int c) const { return data[static_cast<std::size_t>(r) * dim(1) + c]; }

    double item() const { return data.at(0); }

    bool operator==(const Tensor& o) const { return shape == o.shape && data == o.data; }
};

std::int64_t shape_numel(const std::vector<int>& shape);

}  // namespace podcount::da
