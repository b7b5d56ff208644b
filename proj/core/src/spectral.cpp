#include <complex>
#include <vector>

#include "msfno/errors.hpp"
#include "msfno/fft.hpp"
#include "msfno/graph.hpp"

namespace msfno {

// Conventions (pinned by tests, the source never fixes them):
//   forward: modes[k,c] = sum_j x[j,c] e^{-2*pi*i*k*j/n}, unnormalized,
//            k = 0..k_max-1 with k_max <= floor(n/2)+1
//   inverse: 1/n normalization, Hermitian reconstruction from the retained
//            nonnegative modes; interior modes weigh 2, the DC mode and the
//            Nyquist mode (even n, k = n/2) weigh 1 with imaginary part
//            dropped, so the output is exactly real.

struct GraphOps {
    static NodeId rdft(Graph& g, NodeId x, std::size_t k_max);
    static NodeId spectral_mix(Graph& g, NodeId spec, NodeId r);
    static NodeId irdft(Graph& g, NodeId spec, std::size_t n);
};

NodeId GraphOps::rdft(Graph& g, NodeId x, std::size_t k_max) {
    const Tensor& vx = g.nodes_[x].value;
    if (vx.shape.size() != 2 || vx.dtype != Dtype::Real)
        throw config_error("rdft: expected real [n, d_v] input");
    const std::size_t n = vx.shape[0], dv = vx.shape[1];
    if (n < 2) throw config_error("rdft: signal length must be >= 2");
    if (k_max < 1 || k_max > n / 2 + 1)
        throw config_error("rdft: k_max " + std::to_string(k_max) + " out of range [1, " +
                           std::to_string(n / 2 + 1) + "] for n = " + std::to_string(n));

    Tensor out = Tensor::zeros({k_max, dv}, Dtype::Complex);
    std::vector<std::complex<double>> col(n);
    for (std::size_t c = 0; c < dv; ++c) {
        for (std::size_t j = 0; j < n; ++j) col[j] = vx.data[j * dv + c];
        fft::forward(col.data(), n);
        for (std::size_t k = 0; k < k_max; ++k) {
            out.data[2 * (k * dv + c)] = col[k].real();
            out.data[2 * (k * dv + c) + 1] = col[k].imag();
        }
    }

    bool ng = g.nodes_[x].needs_grad;
    NodeId id = g.push(std::move(out), ng, {});
    if (ng) {
        g.nodes_[id].back = [id, x, n, dv, k_max](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            Tensor& gx = g.grad_buffer(x);
            // grad_x[j,c] = Re( sum_k go[k,c] e^{+2*pi*i*k*j/n} )
            std::vector<std::complex<double>> col(n);
            for (std::size_t c = 0; c < dv; ++c) {
                std::fill(col.begin(), col.end(), std::complex<double>(0.0, 0.0));
                for (std::size_t k = 0; k < k_max; ++k)
                    col[k] = {go.data[2 * (k * dv + c)], go.data[2 * (k * dv + c) + 1]};
                fft::inverse_unnormalized(col.data(), n);
                for (std::size_t j = 0; j < n; ++j) gx.data[j * dv + c] += col[j].real();
            }
        };
    }
    return id;
}

NodeId GraphOps::spectral_mix(Graph& g, NodeId spec, NodeId r) {
    const Tensor& vs = g.nodes_[spec].value;
    const Tensor& vr = g.nodes_[r].value;
    if (vs.shape.size() != 2 || vs.dtype != Dtype::Complex)
        throw config_error("spectral_mix: expected complex [k_max, d_v] spectrum");
    if (vr.shape.size() != 3 || vr.dtype != Dtype::Complex || vr.shape[0] != vs.shape[0] ||
        vr.shape[1] != vs.shape[1] || vr.shape[2] != vs.shape[1])
        throw config_error("spectral_mix: weight shape " + shape_to_string(vr.shape) +
                           " incompatible with spectrum " + shape_to_string(vs.shape));
    const std::size_t km = vs.shape[0], dv = vs.shape[1];

    Tensor out = Tensor::zeros({km, dv}, Dtype::Complex);
    for (std::size_t k = 0; k < km; ++k) {
        const double* sk = vs.data.data() + 2 * k * dv;
        const double* rk = vr.data.data() + 2 * k * dv * dv;
        double* ok = out.data.data() + 2 * k * dv;
        for (std::size_t l = 0; l < dv; ++l) {
            double re = 0.0, im = 0.0;
            const double* rl = rk + 2 * l * dv;
            for (std::size_t i = 0; i < dv; ++i) {
                const double ar = rl[2 * i], ai = rl[2 * i + 1];
                const double br = sk[2 * i], bi = sk[2 * i + 1];
                re += ar * br - ai * bi;
                im += ar * bi + ai * br;
            }
            ok[2 * l] = re;
            ok[2 * l + 1] = im;
        }
    }

    bool ng = g.nodes_[spec].needs_grad || g.nodes_[r].needs_grad;
    NodeId id = g.push(std::move(out), ng, {});
    if (ng) {
        g.nodes_[id].back = [id, spec, r, km, dv](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            const Tensor& vs = g.nodes_[spec].value;
            const Tensor& vr = g.nodes_[r].value;
            // Real-view chain rule for out = r * s: grad_r += go * conj(s),
            // grad_s += go * conj(r).
            if (g.nodes_[r].needs_grad) {
                Tensor& gr = g.grad_buffer(r);
                for (std::size_t k = 0; k < km; ++k) {
                    const double* gk = go.data.data() + 2 * k * dv;
                    const double* sk = vs.data.data() + 2 * k * dv;
                    double* grk = gr.data.data() + 2 * k * dv * dv;
                    for (std::size_t l = 0; l < dv; ++l) {
                        const double gre = gk[2 * l], gim = gk[2 * l + 1];
                        double* grl = grk + 2 * l * dv;
                        for (std::size_t i = 0; i < dv; ++i) {
                            const double br = sk[2 * i], bi = sk[2 * i + 1];
                            grl[2 * i] += gre * br + gim * bi;
                            grl[2 * i + 1] += -gre * bi + gim * br;
                        }
                    }
                }
            }
            if (g.nodes_[spec].needs_grad) {
                Tensor& gs = g.grad_buffer(spec);
                for (std::size_t k = 0; k < km; ++k) {
                    const double* gk = go.data.data() + 2 * k * dv;
                    const double* rk = vr.data.data() + 2 * k * dv * dv;
                    double* gsk = gs.data.data() + 2 * k * dv;
                    for (std::size_t l = 0; l < dv; ++l) {
                        const double gre = gk[2 * l], gim = gk[2 * l + 1];
                        const double* rl = rk + 2 * l * dv;
                        for (std::size_t i = 0; i < dv; ++i) {
                            const double ar = rl[2 * i], ai = rl[2 * i + 1];
                            gsk[2 * i] += gre * ar + gim * ai;
                            gsk[2 * i + 1] += -gre * ai + gim * ar;
                        }
                    }
                }
            }
        };
    }
    return id;
}

NodeId GraphOps::irdft(Graph& g, NodeId spec, std::size_t n) {
    const Tensor& vs = g.nodes_[spec].value;
    if (vs.shape.size() != 2 || vs.dtype != Dtype::Complex)
        throw config_error("irdft: expected complex [k_max, d_v] spectrum");
    if (n < 2) throw config_error("irdft: grid length must be >= 2");
    const std::size_t km = vs.shape[0], dv = vs.shape[1];
    if (km > n / 2 + 1)
        throw config_error("irdft: spectrum has " + std::to_string(km) +
                           " modes but grid of " + std::to_string(n) + " supports at most " +
                           std::to_string(n / 2 + 1));

    const bool has_nyquist = (n % 2 == 0) && (km == n / 2 + 1);
    Tensor out = Tensor::zeros({n, dv});
    std::vector<std::complex<double>> full(n);
    for (std::size_t c = 0; c < dv; ++c) {
        std::fill(full.begin(), full.end(), std::complex<double>(0.0, 0.0));
        full[0] = vs.data[2 * c];  // imaginary part of DC dropped
        for (std::size_t k = 1; k < km; ++k) {
            std::complex<double> m(vs.data[2 * (k * dv + c)], vs.data[2 * (k * dv + c) + 1]);
            if (has_nyquist && k == n / 2) {
                full[k] = m.real();  // self-conjugate bin
            } else {
                full[k] = m;
                full[n - k] = std::conj(m);
            }
        }
        fft::inverse_unnormalized(full.data(), n);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) out.data[j * dv + c] = full[j].real() * inv_n;
    }

    bool ng = g.nodes_[spec].needs_grad;
    NodeId id = g.push(std::move(out), ng, {});
    if (ng) {
        g.nodes_[id].back = [id, spec, n, dv, km, has_nyquist](Graph& g) {
            const Tensor& go = g.nodes_[id].grad;
            Tensor& gs = g.grad_buffer(spec);
            // grad_modes[k,c] = (w_k / n) * DFT(go[:,c])[k], with the
            // imaginary part zeroed where it was dropped on the forward.
            std::vector<std::complex<double>> col(n);
            const double inv_n = 1.0 / static_cast<double>(n);
            for (std::size_t c = 0; c < dv; ++c) {
                for (std::size_t j = 0; j < n; ++j) col[j] = go.data[j * dv + c];
                fft::forward(col.data(), n);
                for (std::size_t k = 0; k < km; ++k) {
                    const bool self_conj = (k == 0) || (has_nyquist && k == n / 2);
                    const double w = self_conj ? 1.0 : 2.0;
                    gs.data[2 * (k * dv + c)] += w * inv_n * col[k].real();
                    if (!self_conj) gs.data[2 * (k * dv + c) + 1] += w * inv_n * col[k].imag();
                }
            }
        };
    }
    return id;
}

NodeId Graph::rdft(NodeId x, std::size_t k_max) { return GraphOps::rdft(*this, x, k_max); }
NodeId Graph::spectral_mix(NodeId spec, NodeId r) { return GraphOps::spectral_mix(*this, spec, r); }
NodeId Graph::irdft(NodeId spec, std::size_t n) { return GraphOps::irdft(*this, spec, n); }

}  // namespace msfno
