#include "msfno/graph.hpp"

#include <cmath>

#include "msfno/errors.hpp"

namespace msfno {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double gelu_value(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_derivative(double x) {
    return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

void check_binary_shapes(const Tensor& a, const Tensor& b, const char* op) {
    if (a.same_shape(b)) return;
    if (a.is_scalar() || b.is_scalar()) return;
    throw config_error(std::string(op) + ": shape mismatch " + shape_to_string(a.shape) +
                       " vs " + shape_to_string(b.shape));
}

}  // namespace

NodeId Graph::push(Tensor value, bool needs_grad, std::function<void(Graph&)> back) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

Tensor& Graph::grad_buffer(NodeId id) {
    Node& n = nodes_[id];
    if (n.grad.data.empty()) n.grad = Tensor::zeros(n.value.shape, n.value.dtype);
    return n.grad;
}

const Tensor& Graph::grad(NodeId id) { return grad_buffer(id); }

NodeId Graph::leaf(Tensor value) { return push(std::move(value), true, {}); }

NodeId Graph::constant(Tensor value) { return push(std::move(value), false, {}); }

NodeId Graph::add(NodeId a, NodeId b) {
    const Tensor& va = nodes_[a].value;
    const Tensor& vb = nodes_[b].value;
    check_binary_shapes(va, vb, "add");
    bool a_scalar = va.is_scalar() && !va.same_shape(vb);
    bool b_scalar = vb.is_scalar() && !vb.same_shape(va);
    Tensor out = a_scalar ? vb : va;
    if (b_scalar) {
        for (double& v : out.data) v += vb.data[0];
    } else if (a_scalar) {
        for (double& v : out.data) v += va.data[0];
    } else {
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = va.data[i] + vb.data[i];
    }
    bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
    NodeId id = push(std::move(out), ng, {});
    if (ng) {
        nodes_[id].back = [id, a, b](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            for (NodeId p : {a, b}) {
                if (!g.nodes_[p].needs_grad) continue;
                Tensor& gp = g.grad_buffer(p);
                if (gp.data.size() == go.data.size()) {
                    for (std::size_t i = 0; i < go.data.size(); ++i) gp.data[i] += go.data[i];
                } else {  // scalar operand: reduce
                    double s = 0.0;
                    for (double v : go.data) s += v;
                    gp.data[0] += s;
                }
            }
        };
    }
    return id;
}

NodeId Graph::sub(NodeId a, NodeId b) {
    const Tensor& va = nodes_[a].value;
    const Tensor& vb = nodes_[b].value;
    check_binary_shapes(va, vb, "sub");
    bool a_scalar = va.is_scalar() && !va.same_shape(vb);
    bool b_scalar = vb.is_scalar() && !vb.same_shape(va);
    Tensor out = a_scalar ? Tensor::zeros(vb.shape, vb.dtype) : Tensor::zeros(va.shape, va.dtype);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        double x = a_scalar ? va.data[0] : va.data[i];
        double y = b_scalar ? vb.data[0] : vb.data[i];
        out.data[i] = x - y;
    }
    bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
    NodeId id = push(std::move(out), ng, {});
    if (ng) {
        nodes_[id].back = [id, a, b](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            if (g.nodes_[a].needs_grad) {
                Tensor& ga = g.grad_buffer(a);
                if (ga.data.size() == go.data.size()) {
                    for (std::size_t i = 0; i < go.data.size(); ++i) ga.data[i] += go.data[i];
                } else {
                    double s = 0.0;
                    for (double v : go.data) s += v;
                    ga.data[0] += s;
                }
            }
            if (g.nodes_[b].needs_grad) {
                Tensor& gb = g.grad_buffer(b);
                if (gb.data.size() == go.data.size()) {
                    for (std::size_t i = 0; i < go.data.size(); ++i) gb.data[i] -= go.data[i];
                } else {
                    double s = 0.0;
                    for (double v : go.data) s += v;
                    gb.data[0] -= s;
                }
            }
        };
    }
    return id;
}

NodeId Graph::mul(NodeId a, NodeId b) {
    const Tensor& va = nodes_[a].value;
    const Tensor& vb = nodes_[b].value;
    check_binary_shapes(va, vb, "mul");
    bool a_scalar = va.is_scalar() && !va.same_shape(vb);
    bool b_scalar = vb.is_scalar() && !vb.same_shape(va);
    Tensor out = a_scalar ? Tensor::zeros(vb.shape, vb.dtype) : Tensor::zeros(va.shape, va.dtype);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        double x = a_scalar ? va.data[0] : va.data[i];
        double y = b_scalar ? vb.data[0] : vb.data[i];
        out.data[i] = x * y;
    }
    bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
    NodeId id = push(std::move(out), ng, {});
    if (ng) {
        nodes_[id].back = [id, a, b, a_scalar, b_scalar](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            const Tensor& va = g.nodes_[a].value;
            const Tensor& vb = g.nodes_[b].value;
            if (g.nodes_[a].needs_grad) {
                Tensor& ga = g.grad_buffer(a);
                if (a_scalar) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < go.data.size(); ++i) s += go.data[i] * vb.data[i];
                    ga.data[0] += s;
                } else {
                    for (std::size_t i = 0; i < go.data.size(); ++i)
                        ga.data[i] += go.data[i] * (b_scalar ? vb.data[0] : vb.data[i]);
                }
            }
            if (g.nodes_[b].needs_grad) {
                Tensor& gb = g.grad_buffer(b);
                if (b_scalar) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < go.data.size(); ++i) s += go.data[i] * va.data[i];
                    gb.data[0] += s;
                } else {
                    for (std::size_t i = 0; i < go.data.size(); ++i)
                        gb.data[i] += go.data[i] * (a_scalar ? va.data[0] : va.data[i]);
                }
            }
        };
    }
    return id;
}

NodeId Graph::scale(NodeId a, double s) {
    Tensor out = nodes_[a].value;
    for (double& v : out.data) v *= s;
    bool ng = nodes_[a].needs_grad;
    NodeId id = push(std::move(out), ng, {});
    if (ng) {
        nodes_[id].back = [id, a, s](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            Tensor& ga = g.grad_buffer(a);
            for (std::size_t i = 0; i < go.data.size(); ++i) ga.data[i] += s * go.data[i];
        };
    }
    return id;
}

NodeId Graph::sin_(NodeId a) {
    const Tensor& va = nodes_[a].value;
    if (va.dtype != Dtype::Real) throw config_error("sin: real tensors only");
    Tensor out = Tensor::zeros(va.shape);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = std::sin(va.data[i]);
    bool ng = nodes_[a].needs_grad;
    NodeId id = push(std::move(out), ng, {});
    if (ng) {
        nodes_[id].back = [id, a](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            const Tensor& va = g.nodes_[a].value;
            Tensor& ga = g.grad_buffer(a);
            for (std::size_t i = 0; i < go.data.size(); ++i)
                ga.data[i] += go.data[i] * std::cos(va.data[i]);
        };
    }
    return id;
}

NodeId Graph::gelu(NodeId a) {
    const Tensor& va = nodes_[a].value;
    if (va.dtype != Dtype::Real) throw config_error("gelu: real tensors only");
    Tensor out = Tensor::zeros(va.shape);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = gelu_value(va.data[i]);
    bool ng = nodes_[a].needs_grad;
    NodeId id = push(std::move(out), ng, {});
    if (ng) {
        nodes_[id].back = [id, a](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            const Tensor& va = g.nodes_[a].value;
            Tensor& ga = g.grad_buffer(a);
            for (std::size_t i = 0; i < go.data.size(); ++i)
                ga.data[i] += go.data[i] * gelu_derivative(va.data[i]);
        };
    }
    return id;
}

NodeId Graph::matmul(NodeId x, NodeId w) {
    const Tensor& vx = nodes_[x].value;
    const Tensor& vw = nodes_[w].value;
    if (vx.shape.size() != 2 || vw.shape.size() != 2 || vx.shape[1] != vw.shape[0])
        throw config_error("matmul: dimension mismatch " + shape_to_string(vx.shape) + " x " +
                           shape_to_string(vw.shape));
    const std::size_t n = vx.shape[0], din = vx.shape[1], dout = vw.shape[1];
    Tensor out = Tensor::zeros({n, dout});
    for (std::size_t j = 0; j < n; ++j) {
        const double* xr = vx.data.data() + j * din;
        double* yr = out.data.data() + j * dout;
        for (std::size_t i = 0; i < din; ++i) {
            const double xv = xr[i];
            const double* wr = vw.data.data() + i * dout;
            for (std::size_t o = 0; o < dout; ++o) yr[o] += xv * wr[o];
        }
    }
    bool ng = nodes_[x].needs_grad || nodes_[w].needs_grad;
    NodeId id = push(std::move(out), ng, {});
    if (ng) {
        nodes_[id].back = [id, x, w, n, din, dout](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            if (g.nodes_[x].needs_grad) {  // gx = go * w^T
                const Tensor& vw = g.nodes_[w].value;
                Tensor& gx = g.grad_buffer(x);
                for (std::size_t j = 0; j < n; ++j) {
                    const double* gr = go.data.data() + j * dout;
                    double* gxr = gx.data.data() + j * din;
                    for (std::size_t i = 0; i < din; ++i) {
                        const double* wr = vw.data.data() + i * dout;
                        double s = 0.0;
                        for (std::size_t o = 0; o < dout; ++o) s += gr[o] * wr[o];
                        gxr[i] += s;
                    }
                }
            }
            if (g.nodes_[w].needs_grad) {  // gw = x^T * go
                const Tensor& vx = g.nodes_[x].value;
                Tensor& gw = g.grad_buffer(w);
                for (std::size_t j = 0; j < n; ++j) {
                    const double* xr = vx.data.data() + j * din;
                    const double* gr = go.data.data() + j * dout;
                    for (std::size_t i = 0; i < din; ++i) {
                        const double xv = xr[i];
                        double* gwr = gw.data.data() + i * dout;
                        for (std::size_t o = 0; o < dout; ++o) gwr[o] += xv * gr[o];
                    }
                }
            }
        };
    }
    return id;
}

NodeId Graph::bias_add(NodeId x, NodeId b) {
    const Tensor& vx = nodes_[x].value;
    const Tensor& vb = nodes_[b].value;
    if (vx.shape.size() != 2 || vb.numel() != vx.shape[1])
        throw config_error("bias_add: bias length " + shape_to_string(vb.shape) +
                           " does not match columns of " + shape_to_string(vx.shape));
    const std::size_t n = vx.shape[0], d = vx.shape[1];
    Tensor out = vx;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t o = 0; o < d; ++o) out.data[j * d + o] += vb.data[o];
    bool ng = nodes_[x].needs_grad || nodes_[b].needs_grad;
    NodeId id = push(std::move(out), ng, {});
    if (ng) {
        nodes_[id].back = [id, x, b, n, d](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            if (g.nodes_[x].needs_grad) {
                Tensor& gx = g.grad_buffer(x);
                for (std::size_t i = 0; i < go.data.size(); ++i) gx.data[i] += go.data[i];
            }
            if (g.nodes_[b].needs_grad) {
                Tensor& gb = g.grad_buffer(b);
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t o = 0; o < d; ++o) gb.data[o] += go.data[j * d + o];
            }
        };
    }
    return id;
}

NodeId Graph::affine(NodeId x, NodeId w, NodeId b) { return bias_add(matmul(x, w), b); }

NodeId Graph::sum(NodeId a) {
    const Tensor& va = nodes_[a].value;
    if (va.dtype != Dtype::Real) throw config_error("sum: real tensors only");
    double s = 0.0;
    for (double v : va.data) s += v;
    bool ng = nodes_[a].needs_grad;
    NodeId id = push(Tensor::scalar(s), ng, {});
    if (ng) {
        nodes_[id].back = [id, a](Graph& g) {
            const double go = g.nodes_[id].grad.data[0];
            Tensor& ga = g.grad_buffer(a);
            for (double& v : ga.data) v += go;
        };
    }
    return id;
}

NodeId Graph::sqrt_(NodeId a) {
    const Tensor& va = nodes_[a].value;
    if (va.dtype != Dtype::Real) throw config_error("sqrt: real tensors only");
    Tensor out = Tensor::zeros(va.shape);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = std::sqrt(va.data[i]);
    bool ng = nodes_[a].needs_grad;
    NodeId id = push(std::move(out), ng, {});
    if (ng) {
        nodes_[id].back = [id, a](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            const Tensor& vo = g.nodes_[id].value;
            Tensor& ga = g.grad_buffer(a);
            for (std::size_t i = 0; i < go.data.size(); ++i)
                ga.data[i] += go.data[i] * 0.5 / vo.data[i];
        };
    }
    return id;
}

NodeId Graph::index_scalar(NodeId v, std::size_t i) {
    const Tensor& vv = nodes_[v].value;
    if (vv.dtype != Dtype::Real || i >= vv.numel())
        throw config_error("index_scalar: index out of range");
    bool ng = nodes_[v].needs_grad;
    NodeId id = push(Tensor::scalar(vv.data[i]), ng, {});
    if (ng) {
        nodes_[id].back = [id, v, i](Graph& g) {
            g.grad_buffer(v).data[i] += g.nodes_[id].grad.data[0];
        };
    }
    return id;
}

void Graph::backward(NodeId loss) {
    const Tensor& lv = nodes_[loss].value;
    if (lv.numel() != 1 || lv.dtype != Dtype::Real)
        throw config_error("backward: loss must be a real scalar, got " +
                           shape_to_string(lv.shape));
    grad_buffer(loss).data[0] += 1.0;
    for (NodeId id = loss; id >= 0; --id) {
        Node& n = nodes_[id];
        if (!n.needs_grad || !n.back) continue;
        if (n.grad.data.empty()) continue;  // not on a path to the loss
        n.back(*this);
    }
    // Leaves never touched still report zero gradients via grad().
}

void Graph::zero_grad() {
    for (Node& n : nodes_) n.grad = Tensor();
}

}  // namespace msfno
