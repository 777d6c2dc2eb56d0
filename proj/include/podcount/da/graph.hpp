#pragma once

#include <functional>
#include <vector>

#include "podcount/da/tensor.hpp"
#include "podcount/types.hpp"

namespace podcount::da {

struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

/// Reverse-mode tape over small dense tensors. Build a fresh graph per
/// training step; ops record a backward closure that accumulates into the
/// parents' grad buffers. Closures capture node ids only — the node vector
/// reallocates as ops are appended.
class Graph {
public:
    /// Leaf without gradient (inputs, targets).
    Var constant(Tensor value);
    /// Leaf with gradient. The graph owns a copy of the value; read the
    /// gradient back with grad() after backward().
    Var param(const Tensor& value);

    // elementwise
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double c);
    Var add_scalar(Var a, double c);
    Var relu(Var a);
    Var sigmoid(Var a);

    // shape ops
    Var slice0(Var a, int i0, int i1);       // slice along the first dimension
    Var cell_vector(Var a, int row, int col); // [C,H,W] -> [C]
    Var concat(const std::vector<Var>& parts); // 1-D tensors -> one vector
    Var spatial_mean(Var a);                 // [C,H,W] -> [C]

    // dense / conv
    Var linear(Var x, Var w, Var b);         // [n], [m,n], [m] -> [m]
    Var conv3x3(Var x, Var w, Var b);        // [Cin,H,W], [Cout,Cin,3,3], [Cout] -> [Cout,H,W], pad 1
    Var conv1x1(Var x, Var w, Var b);        // [Cin,H,W], [Cout,Cin], [Cout] -> [Cout,H,W]
    Var avg_pool2(Var a);                    // [C,H,W] -> [C,H/2,W/2]

    /// Gradient reversal: forward copies the input, backward multiplies the
    /// upstream gradient by -alpha.
    Var grl(Var a, double alpha);

    /// Crop `box` (normalized coords) out of a [C,H,W] map with one bilinear
    /// sample per output cell center, border-clamped -> [C,S,S].
    Var roi_bilinear(Var level, const Box& box, int out_size);

    // reductions / losses
    Var mean(Var a);                          // -> [1]
    Var sum(Var a);                           // -> [1]
    Var bce_with_logits_mean(Var logits, Tensor targets);
    Var softmax_ce(Var logits, int target_index);  // [K] -> [1]
    Var mse_mean(Var pred, Tensor target);

    void backward(Var loss);

    const Tensor& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
    /// Gradient of the last backward() w.r.t. v. Zero tensor if v was not
    /// reached. Only grad-enabled nodes carry gradients.
    const Tensor& grad(Var v) const;

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool needs_grad = false;
        bool grad_ready = false;
        std::function<void(Graph&, int)> backward;
    };

    std::vector<Node> nodes_;

    Var emit(Tensor value, bool needs_grad, std::function<void(Graph&, int)> backward);
    Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
    const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    bool needs(Var v) const { return node(v.id).needs_grad; }
    /// Accumulate into a parent's gradient buffer (no-op for non-grad nodes).
    void accum(int id, const std::vector<double>& g);
    double* grad_buffer(int id);

    friend struct GraphTestAccess;
};

/// Bilinear sampling footprint of one ROI output cell.
struct BilinearTap {
    int x0, y0, x1, y1;
    double w00, w01, w10, w11;  // (y0,x0), (y0,x1), (y1,x0), (y1,x1)
};

/// Sample positions for an out_size x out_size grid over `box` on a WxH map.
/// Row-major over output cells. Shared by the graph op and the numeric path.
std::vector<BilinearTap> roi_sample_grid(int width, int height, const Box& box, int out_size);

}  // namespace podcount::da
