#include "podcount/da/tensor.hpp"

#include <stdexcept>

namespace podcount::da {

std::int64_t shape_numel(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw std::logic_error("tensor dimensions must be positive");
        n *= d;
    }
    return n;
}

Tensor Tensor::zeros(std::vector<int> shape) {
    Tensor t;
    const auto n = shape_numel(shape);
    t.shape = std::move(shape);
    t.data.assign(static_cast<std::size_t>(n), 0.0);
    return t;
}

Tensor Tensor::full(std::vector<int> shape, double v) {
    Tensor t = zeros(std::move(shape));
    for (auto& x : t.data) x = v;
    return t;
}

Tensor Tensor::scalar(double v) {
    Tensor t;
    t.shape = {1};
    t.data = {v};
    return t;
}

Tensor Tensor::from_vector(std::vector<double> v) {
    Tensor t;
    t.shape = {static_cast<int>(v.size())};
    t.data = std::move(v);
    return t;
}

}  // namespace podcount::da
