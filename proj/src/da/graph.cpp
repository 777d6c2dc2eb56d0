#include "podcount/da/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace podcount::da {

namespace {

void check(bool cond, const char* what) {
    if (!cond) throw std::logic_error(what);
}

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Var Graph::emit(Tensor value, bool needs_grad, std::function<void(Graph&, int)> backward) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::constant(Tensor value) {
    return emit(std::move(value), false, nullptr);
}

Var Graph::param(const Tensor& value) {
    return emit(value, true, nullptr);
}

const Tensor& Graph::grad(Var v) const {
    const Node& n = node(v.id);
    check(n.needs_grad, "grad() on a non-grad node");
    static const Tensor kEmpty;
    if (!n.grad_ready) {
        // backward() was not run or did not reach this node
        const_cast<Node&>(n).grad = Tensor::zeros(n.value.shape);
        const_cast<Node&>(n).grad_ready = true;
    }
    (void)kEmpty;
    return n.grad;
}

double* Graph::grad_buffer(int id) {
    Node& n = node(id);
    if (!n.grad_ready) {
        n.grad = Tensor::zeros(n.value.shape);
        n.grad_ready = true;
    }
    return n.grad.data.data();
}

void Graph::accum(int id, const std::vector<double>& g) {
    Node& n = node(id);
    if (!n.needs_grad) return;
    double* dst = grad_buffer(id);
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

void Graph::backward(Var loss) {
    check(loss.valid(), "backward on invalid var");
    check(node(loss.id).value.numel() == 1, "backward needs a scalar loss");
    for (auto& n : nodes_) {
        n.grad_ready = false;
        n.grad.data.clear();
        n.grad.shape.clear();
    }
    Node& top = node(loss.id);
    top.grad = Tensor::full(top.value.shape, 1.0);
    top.grad_ready = true;
    for (int id = loss.id; id >= 0; --id) {
        Node& n = node(id);
        if (n.needs_grad && n.grad_ready && n.backward) {
            n.backward(*this, id);
        }
    }
}

// ---------------------------------------------------------------------------
// elementwise

Var Graph::add(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    check(ta.same_shape(tb), "add: shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += tb.data[i];
    const bool ng = needs(a) || needs(b);
    const int ia = a.id, ib = b.id;
    return emit(std::move(out), ng, [ia, ib](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        g.accum(ia, go.data);
        g.accum(ib, go.data);
    });
}

Var Graph::sub(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    check(ta.same_shape(tb), "sub: shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= tb.data[i];
    const bool ng = needs(a) || needs(b);
    const int ia = a.id, ib = b.id;
    return emit(std::move(out), ng, [ia, ib](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        g.accum(ia, go.data);
        if (g.node(ib).needs_grad) {
            double* dst = g.grad_buffer(ib);
            for (std::size_t i = 0; i < go.data.size(); ++i) dst[i] -= go.data[i];
        }
    });
}

Var Graph::mul(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    check(ta.same_shape(tb), "mul: shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= tb.data[i];
    const bool ng = needs(a) || needs(b);
    const int ia = a.id, ib = b.id;
    return emit(std::move(out), ng, [ia, ib](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        const Tensor& va = g.node(ia).value;
        const Tensor& vb = g.node(ib).value;
        if (g.node(ia).needs_grad) {
            double* dst = g.grad_buffer(ia);
            for (std::size_t i = 0; i < go.data.size(); ++i) dst[i] += go.data[i] * vb.data[i];
        }
        if (g.node(ib).needs_grad) {
            double* dst = g.grad_buffer(ib);
            for (std::size_t i = 0; i < go.data.size(); ++i) dst[i] += go.data[i] * va.data[i];
        }
    });
}

Var Graph::scale(Var a, double c) {
    Tensor out = value(a);
    for (auto& x : out.data) x *= c;
    const int ia = a.id;
    return emit(std::move(out), needs(a), [ia, c](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia);
        for (std::size_t i = 0; i < go.data.size(); ++i) dst[i] += c * go.data[i];
    });
}

Var Graph::add_scalar(Var a, double c) {
    Tensor out = value(a);
    for (auto& x : out.data) x += c;
    const int ia = a.id;
    return emit(std::move(out), needs(a), [ia](Graph& g, int self) {
        g.accum(ia, g.node(self).grad.data);
    });
}

Var Graph::relu(Var a) {
    Tensor out = value(a);
    for (auto& x : out.data) x = x > 0.0 ? x : 0.0;
    const int ia = a.id;
    return emit(std::move(out), needs(a), [ia](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        const Tensor& va = g.node(ia).value;
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia);
        for (std::size_t i = 0; i < go.data.size(); ++i) {
            if (va.data[i] > 0.0) dst[i] += go.data[i];
        }
    });
}

Var Graph::sigmoid(Var a) {
    Tensor out = value(a);
    for (auto& x : out.data) x = stable_sigmoid(x);
    const int ia = a.id;
    const int self_hint = static_cast<int>(nodes_.size());
    (void)self_hint;
    return emit(std::move(out), needs(a), [ia](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        const Tensor& vo = g.node(self).value;
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia);
        for (std::size_t i = 0; i < go.data.size(); ++i) {
            dst[i] += go.data[i] * vo.data[i] * (1.0 - vo.data[i]);
        }
    });
}

// ---------------------------------------------------------------------------
// shape ops

Var Graph::slice0(Var a, int i0, int i1) {
    const Tensor& ta = value(a);
    check(ta.ndim() >= 1 && 0 <= i0 && i0 < i1 && i1 <= ta.dim(0), "slice0: bad range");
    std::int64_t stride = 1;
    for (int d = 1; d < ta.ndim(); ++d) stride *= ta.dim(d);
    Tensor out;
    out.shape = ta.shape;
    out.shape[0] = i1 - i0;
    out.data.assign(ta.data.begin() + i0 * stride, ta.data.begin() + i1 * stride);
    const int ia = a.id;
    const std::int64_t off = i0 * stride;
    return emit(std::move(out), needs(a), [ia, off](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia) + off;
        for (std::size_t i = 0; i < go.data.size(); ++i) dst[i] += go.data[i];
    });
}

Var Graph::cell_vector(Var a, int row, int col) {
    const Tensor& ta = value(a);
    check(ta.ndim() == 3, "cell_vector: expects [C,H,W]");
    const int C = ta.dim(0), H = ta.dim(1), W = ta.dim(2);
    check(0 <= row && row < H && 0 <= col && col < W, "cell_vector: out of range");
    Tensor out = Tensor::zeros({C});
    for (int c = 0; c < C; ++c) out.data[c] = ta.at3(c, row, col);
    const int ia = a.id;
    return emit(std::move(out), needs(a), [ia, row, col, C, H, W](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia);
        for (int c = 0; c < C; ++c) {
            dst[(static_cast<std::size_t>(c) * H + row) * W + col] += go.data[c];
        }
    });
}

Var Graph::concat(const std::vector<Var>& parts) {
    check(!parts.empty(), "concat: empty");
    std::vector<double> data;
    std::vector<int> ids;
    std::vector<int> sizes;
    bool ng = false;
    for (Var p : parts) {
        const Tensor& t = value(p);
        check(t.ndim() == 1, "concat: 1-D tensors only");
        data.insert(data.end(), t.data.begin(), t.data.end());
        ids.push_back(p.id);
        sizes.push_back(static_cast<int>(t.data.size()));
        ng = ng || needs(p);
    }
    Tensor out = Tensor::from_vector(std::move(data));
    return emit(std::move(out), ng, [ids, sizes](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        std::size_t off = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (g.node(ids[k]).needs_grad) {
                double* dst = g.grad_buffer(ids[k]);
                for (int i = 0; i < sizes[k]; ++i) dst[i] += go.data[off + i];
            }
            off += static_cast<std::size_t>(sizes[k]);
        }
    });
}

Var Graph::spatial_mean(Var a) {
    const Tensor& ta = value(a);
    check(ta.ndim() == 3, "spatial_mean: expects [C,H,W]");
    const int C = ta.dim(0), H = ta.dim(1), W = ta.dim(2);
    Tensor out = Tensor::zeros({C});
    const double inv = 1.0 / (static_cast<double>(H) * W);
    for (int c = 0; c < C; ++c) {
        double s = 0.0;
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) s += ta.at3(c, y, x);
        out.data[c] = s * inv;
    }
    const int ia = a.id;
    return emit(std::move(out), needs(a), [ia, C, H, W, inv](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia);
        for (int c = 0; c < C; ++c) {
            const double gc = go.data[c] * inv;
            double* plane = dst + static_cast<std::size_t>(c) * H * W;
            for (int i = 0; i < H * W; ++i) plane[i] += gc;
        }
    });
}

// ---------------------------------------------------------------------------
// dense / conv

Var Graph::linear(Var x, Var w, Var b) {
    const Tensor& tx = value(x);
    const Tensor& tw = value(w);
    const Tensor& tb = value(b);
    check(tx.ndim() == 1 && tw.ndim() == 2 && tb.ndim() == 1, "linear: bad ranks");
    const int n = tx.dim(0), m = tw.dim(0);
    check(tw.dim(1) == n && tb.dim(0) == m, "linear: shape mismatch");
    Tensor out = Tensor::zeros({m});
    for (int i = 0; i < m; ++i) {
        double s = tb.data[i];
        const double* row = tw.data.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) s += row[j] * tx.data[j];
        out.data[i] = s;
    }
    const bool ng = needs(x) || needs(w) || needs(b);
    const int ix = x.id, iw = w.id, ib = b.id;
    return emit(std::move(out), ng, [ix, iw, ib, m, n](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        const Tensor& vx = g.node(ix).value;
        const Tensor& vw = g.node(iw).value;
        if (g.node(ix).needs_grad) {
            double* dst = g.grad_buffer(ix);
            for (int i = 0; i < m; ++i) {
                const double gi = go.data[i];
                const double* row = vw.data.data() + static_cast<std::size_t>(i) * n;
                for (int j = 0; j < n; ++j) dst[j] += gi * row[j];
            }
        }
        if (g.node(iw).needs_grad) {
            double* dst = g.grad_buffer(iw);
            for (int i = 0; i < m; ++i) {
                const double gi = go.data[i];
                double* row = dst + static_cast<std::size_t>(i) * n;
                for (int j = 0; j < n; ++j) row[j] += gi * vx.data[j];
            }
        }
        if (g.node(ib).needs_grad) {
            g.accum(ib, go.data);
        }
    });
}

Var Graph::conv3x3(Var x, Var w, Var b) {
    const Tensor& tx = value(x);
    const Tensor& tw = value(w);
    const Tensor& tb = value(b);
    check(tx.ndim() == 3 && tw.ndim() == 4 && tb.ndim() == 1, "conv3x3: bad ranks");
    const int Cin = tx.dim(0), H = tx.dim(1), W = tx.dim(2);
    const int Cout = tw.dim(0);
    check(tw.dim(1) == Cin && tw.dim(2) == 3 && tw.dim(3) == 3 && tb.dim(0) == Cout,
          "conv3x3: shape mismatch");
    Tensor out = Tensor::zeros({Cout, H, W});
    for (int co = 0; co < Cout; ++co) {
        for (int y = 0; y < H; ++y) {
            for (int xPos = 0; xPos < W; ++xPos) {
                double s = tb.data[co];
                for (int ci = 0; ci < Cin; ++ci) {
                    for (int ky = 0; ky < 3; ++ky) {
                        const int iy = y + ky - 1;
                        if (iy < 0 || iy >= H) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int ix2 = xPos + kx - 1;
                            if (ix2 < 0 || ix2 >= W) continue;
                            s += tx.at3(ci, iy, ix2) *
                                 tw.data[((static_cast<std::size_t>(co) * Cin + ci) * 3 + ky) * 3 + kx];
                        }
                    }
                }
                out.at3(co, y, xPos) = s;
            }
        }
    }
    const bool ng = needs(x) || needs(w) || needs(b);
    const int ix = x.id, iw = w.id, ib = b.id;
    return emit(std::move(out), ng, [ix, iw, ib, Cin, Cout, H, W](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        const Tensor& vx = g.node(ix).value;
        const Tensor& vw = g.node(iw).value;
        const bool gx = g.node(ix).needs_grad;
        const bool gw = g.node(iw).needs_grad;
        const bool gb = g.node(ib).needs_grad;
        double* dx = gx ? g.grad_buffer(ix) : nullptr;
        double* dw = gw ? g.grad_buffer(iw) : nullptr;
        double* db = gb ? g.grad_buffer(ib) : nullptr;
        for (int co = 0; co < Cout; ++co) {
            for (int y = 0; y < H; ++y) {
                for (int xPos = 0; xPos < W; ++xPos) {
                    const double gOut = go.data[(static_cast<std::size_t>(co) * H + y) * W + xPos];
                    if (gOut == 0.0) continue;
                    if (db) db[co] += gOut;
                    for (int ci = 0; ci < Cin; ++ci) {
                        for (int ky = 0; ky < 3; ++ky) {
                            const int iy = y + ky - 1;
                            if (iy < 0 || iy >= H) continue;
                            for (int kx = 0; kx < 3; ++kx) {
                                const int ix2 = xPos + kx - 1;
                                if (ix2 < 0 || ix2 >= W) continue;
                                const std::size_t wi =
                                    ((static_cast<std::size_t>(co) * Cin + ci) * 3 + ky) * 3 + kx;
                                const std::size_t xi =
                                    (static_cast<std::size_t>(ci) * H + iy) * W + ix2;
                                if (dx) dx[xi] += gOut * vw.data[wi];
                                if (dw) dw[wi] += gOut * vx.data[xi];
                            }
                        }
                    }
                }
            }
        }
    });
}

Var Graph::conv1x1(Var x, Var w, Var b) {
    const Tensor& tx = value(x);
    const Tensor& tw = value(w);
    const Tensor& tb = value(b);
    check(tx.ndim() == 3 && tw.ndim() == 2 && tb.ndim() == 1, "conv1x1: bad ranks");
    const int Cin = tx.dim(0), H = tx.dim(1), W = tx.dim(2);
    const int Cout = tw.dim(0);
    check(tw.dim(1) == Cin && tb.dim(0) == Cout, "conv1x1: shape mismatch");
    Tensor out = Tensor::zeros({Cout, H, W});
    for (int co = 0; co < Cout; ++co) {
        for (int y = 0; y < H; ++y) {
            for (int xPos = 0; xPos < W; ++xPos) {
                double s = tb.data[co];
                for (int ci = 0; ci < Cin; ++ci) {
                    s += tw.at2(co, ci) * tx.at3(ci, y, xPos);
                }
                out.at3(co, y, xPos) = s;
            }
        }
    }
    const bool ng = needs(x) || needs(w) || needs(b);
    const int ix = x.id, iw = w.id, ib = b.id;
    return emit(std::move(out), ng, [ix, iw, ib, Cin, Cout, H, W](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        const Tensor& vx = g.node(ix).value;
        const Tensor& vw = g.node(iw).value;
        const bool gx = g.node(ix).needs_grad;
        const bool gw = g.node(iw).needs_grad;
        const bool gb = g.node(ib).needs_grad;
        double* dx = gx ? g.grad_buffer(ix) : nullptr;
        double* dw = gw ? g.grad_buffer(iw) : nullptr;
        double* db = gb ? g.grad_buffer(ib) : nullptr;
        for (int co = 0; co < Cout; ++co) {
            for (int y = 0; y < H; ++y) {
                for (int xPos = 0; xPos < W; ++xPos) {
                    const double gOut = go.data[(static_cast<std::size_t>(co) * H + y) * W + xPos];
                    if (gOut == 0.0) continue;
                    if (db) db[co] += gOut;
                    for (int ci = 0; ci < Cin; ++ci) {
                        const std::size_t xi = (static_cast<std::size_t>(ci) * H + y) * W + xPos;
                        if (dx) dx[xi] += gOut * vw.at2(co, ci);
                        if (dw) dw[static_cast<std::size_t>(co) * Cin + ci] += gOut * vx.data[xi];
                    }
                }
            }
        }
    });
}

Var Graph::avg_pool2(Var a) {
    const Tensor& ta = value(a);
    check(ta.ndim() == 3, "avg_pool2: expects [C,H,W]");
    const int C = ta.dim(0), H = ta.dim(1), W = ta.dim(2);
    check(H % 2 == 0 && W % 2 == 0, "avg_pool2: odd spatial size");
    const int Ho = H / 2, Wo = W / 2;
    Tensor out = Tensor::zeros({C, Ho, Wo});
    for (int c = 0; c < C; ++c) {
        for (int y = 0; y < Ho; ++y) {
            for (int x = 0; x < Wo; ++x) {
                out.at3(c, y, x) = 0.25 * (ta.at3(c, 2 * y, 2 * x) + ta.at3(c, 2 * y, 2 * x + 1) +
                                           ta.at3(c, 2 * y + 1, 2 * x) + ta.at3(c, 2 * y + 1, 2 * x + 1));
            }
        }
    }
    const int ia = a.id;
    return emit(std::move(out), needs(a), [ia, C, Ho, Wo, H, W](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia);
        for (int c = 0; c < C; ++c) {
            for (int y = 0; y < Ho; ++y) {
                for (int x = 0; x < Wo; ++x) {
                    const double gq = 0.25 * go.data[(static_cast<std::size_t>(c) * Ho + y) * Wo + x];
                    dst[(static_cast<std::size_t>(c) * H + 2 * y) * W + 2 * x] += gq;
                    dst[(static_cast<std::size_t>(c) * H + 2 * y) * W + 2 * x + 1] += gq;
                    dst[(static_cast<std::size_t>(c) * H + 2 * y + 1) * W + 2 * x] += gq;
                    dst[(static_cast<std::size_t>(c) * H + 2 * y + 1) * W + 2 * x + 1] += gq;
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// GRL and ROI

Var Graph::grl(Var a, double alpha) {
    if (alpha < 0.0) throw ValidationError("GRL alpha must be >= 0");
    Tensor out = value(a);
    const int ia = a.id;
    return emit(std::move(out), needs(a), [ia, alpha](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia);
        for (std::size_t i = 0; i < go.data.size(); ++i) dst[i] += -alpha * go.data[i];
    });
}

std::vector<BilinearTap> roi_sample_grid(int width, int height, const Box& box, int out_size) {
    std::vector<BilinearTap> taps;
    taps.reserve(static_cast<std::size_t>(out_size) * out_size);
    const double u0 = box.x0() * width;
    const double u1 = box.x1() * width;
    const double v0 = box.y0() * height;
    const double v1 = box.y1() * height;
    for (int i = 0; i < out_size; ++i) {
        const double v = v0 + (i + 0.5) * (v1 - v0) / out_size;
        double fy = std::clamp(v - 0.5, 0.0, static_cast<double>(height - 1));
        for (int j = 0; j < out_size; ++j) {
            const double u = u0 + (j + 0.5) * (u1 - u0) / out_size;
            double fx = std::clamp(u - 0.5, 0.0, static_cast<double>(width - 1));
            BilinearTap t;
            t.x0 = static_cast<int>(std::floor(fx));
            t.y0 = static_cast<int>(std::floor(fy));
            t.x1 = std::min(t.x0 + 1, width - 1);
            t.y1 = std::min(t.y0 + 1, height - 1);
            const double tx = fx - t.x0;
            const double ty = fy - t.y0;
            t.w00 = (1.0 - ty) * (1.0 - tx);
            t.w01 = (1.0 - ty) * tx;
            t.w10 = ty * (1.0 - tx);
            t.w11 = ty * tx;
            taps.push_back(t);
        }
    }
    return taps;
}

Var Graph::roi_bilinear(Var level, const Box& box, int out_size) {
    const Tensor& tl = value(level);
    check(tl.ndim() == 3, "roi_bilinear: expects [C,H,W]");
    check(out_size >= 1, "roi_bilinear: out_size >= 1");
    const int C = tl.dim(0), H = tl.dim(1), W = tl.dim(2);
    const auto taps = roi_sample_grid(W, H, box, out_size);
    Tensor out = Tensor::zeros({C, out_size, out_size});
    for (int c = 0; c < C; ++c) {
        for (std::size_t k = 0; k < taps.size(); ++k) {
            const BilinearTap& t = taps[k];
            out.data[static_cast<std::size_t>(c) * taps.size() + k] =
                t.w00 * tl.at3(c, t.y0, t.x0) + t.w01 * tl.at3(c, t.y0, t.x1) +
                t.w10 * tl.at3(c, t.y1, t.x0) + t.w11 * tl.at3(c, t.y1, t.x1);
        }
    }
    const int il = level.id;
    return emit(std::move(out), needs(level), [il, taps, C, H, W](Graph& g, int self) {
        const Tensor& go = g.node(self).grad;
        if (!g.node(il).needs_grad) return;
        double* dst = g.grad_buffer(il);
        for (int c = 0; c < C; ++c) {
            double* plane = dst + static_cast<std::size_t>(c) * H * W;
            for (std::size_t k = 0; k < taps.size(); ++k) {
                const BilinearTap& t = taps[k];
                const double gk = go.data[static_cast<std::size_t>(c) * taps.size() + k];
                if (gk == 0.0) continue;
                plane[static_cast<std::size_t>(t.y0) * W + t.x0] += gk * t.w00;
                plane[static_cast<std::size_t>(t.y0) * W + t.x1] += gk * t.w01;
                plane[static_cast<std::size_t>(t.y1) * W + t.x0] += gk * t.w10;
                plane[static_cast<std::size_t>(t.y1) * W + t.x1] += gk * t.w11;
            }
        }
    });
}

// ---------------------------------------------------------------------------
// reductions / losses

Var Graph::mean(Var a) {
    const Tensor& ta = value(a);
    const double inv = 1.0 / static_cast<double>(ta.numel());
    double s = 0.0;
    for (double x : ta.data) s += x;
    const int ia = a.id;
    return emit(Tensor::scalar(s * inv), needs(a), [ia, inv](Graph& g, int self) {
        const double go = g.node(self).grad.data[0];
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia);
        const std::size_t n = g.node(ia).value.data.size();
        for (std::size_t i = 0; i < n; ++i) dst[i] += go * inv;
    });
}

Var Graph::sum(Var a) {
    const Tensor& ta = value(a);
    double s = 0.0;
    for (double x : ta.data) s += x;
    const int ia = a.id;
    return emit(Tensor::scalar(s), needs(a), [ia](Graph& g, int self) {
        const double go = g.node(self).grad.data[0];
        if (!g.node(ia).needs_grad) return;
        double* dst = g.grad_buffer(ia);
        const std::size_t n = g.node(ia).value.data.size();
        for (std::size_t i = 0; i < n; ++i) dst[i] += go;
    });
}

Var Graph::bce_with_logits_mean(Var logits, Tensor targets) {
    const Tensor& tz = value(logits);
    check(tz.same_shape(targets), "bce: shape mismatch");
    const double inv = 1.0 / static_cast<double>(tz.numel());
    double s = 0.0;
    for (std::size_t i = 0; i < tz.data.size(); ++i) {
        const double z = tz.data[i];
        const double t = targets.data[i];
        s += std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
    }
    const int iz = logits.id;
    auto tgt = std::make_shared<Tensor>(std::move(targets));
    return emit(Tensor::scalar(s * inv), needs(logits), [iz, tgt, inv](Graph& g, int self) {
        const double go = g.node(self).grad.data[0];
        const Tensor& vz = g.node(iz).value;
        if (!g.node(iz).needs_grad) return;
        double* dst = g.grad_buffer(iz);
        for (std::size_t i = 0; i < vz.data.size(); ++i) {
            dst[i] += go * inv * (stable_sigmoid(vz.data[i]) - tgt->data[i]);
        }
    });
}

Var Graph::softmax_ce(Var logits, int target_index) {
    const Tensor& tz = value(logits);
    check(tz.ndim() == 1, "softmax_ce: expects [K]");
    check(0 <= target_index && target_index < tz.dim(0), "softmax_ce: bad target");
    double m = tz.data[0];
    for (double z : tz.data) m = std::max(m, z);
    double lse = 0.0;
    for (double z : tz.data) lse += std::exp(z - m);
    lse = m + std::log(lse);
    const int iz = logits.id;
    return emit(Tensor::scalar(lse - tz.data[static_cast<std::size_t>(target_index)]),
                needs(logits), [iz, target_index](Graph& g, int self) {
        const double go = g.node(self).grad.data[0];
        const Tensor& vz = g.node(iz).value;
        if (!g.node(iz).needs_grad) return;
        double m = vz.data[0];
        for (double z : vz.data) m = std::max(m, z);
        double denom = 0.0;
        for (double z : vz.data) denom += std::exp(z - m);
        double* dst = g.grad_buffer(iz);
        for (std::size_t i = 0; i < vz.data.size(); ++i) {
            const double soft = std::exp(vz.data[i] - m) / denom;
            dst[i] += go * (soft - (static_cast<int>(i) == target_index ? 1.0 : 0.0));
        }
    });
}

Var Graph::mse_mean(Var pred, Tensor target) {
    const Tensor& tp = value(pred);
    check(tp.same_shape(target), "mse: shape mismatch");
    const double inv = 1.0 / static_cast<double>(tp.numel());
    double s = 0.0;
    for (std::size_t i = 0; i < tp.data.size(); ++i) {
        const double d = tp.data[i] - target.data[i];
        s += d * d;
    }
    const int ip = pred.id;
    auto tgt = std::make_shared<Tensor>(std::move(target));
    return emit(Tensor::scalar(s * inv), needs(pred), [ip, tgt, inv](Graph& g, int self) {
        const double go = g.node(self).grad.data[0];
        const Tensor& vp = g.node(ip).value;
        if (!g.node(ip).needs_grad) return;
        double* dst = g.grad_buffer(ip);
        for (std::size_t i = 0; i < vp.data.size(); ++i) {
            dst[i] += go * inv * 2.0 * (vp.data[i] - tgt->data[i]);
        }
    });
}

}  // namespace podcount::da
