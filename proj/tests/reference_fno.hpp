#pragma once

// Straight-line reference evaluation of the FNO and MscaleFNO forward
// passes: explicit loops, direct O(n^2) DFT sums, no graph, no FFT. Used
// as the independent oracle the production path is checked against.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "msfno/fno.hpp"
#include "msfno/mscale.hpp"

namespace testutil {

inline double ref_gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

/// x: [n] grid, a: [n] input values (d = d_a = d_u = 1). Returns [n].
inline std::vector<double> reference_fno(const msfno::FnoParams& p, const std::vector<double>& x,
                                         const std::vector<double>& a) {
    using std::complex;
    const auto& c = p.config;
    const std::size_t n = x.size(), dv = c.d_v, km = c.k_max;

    // lift
    std::vector<std::vector<double>> v(n, std::vector<double>(dv));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t o = 0; o < dv; ++o)
            v[j][o] = x[j] * p.lift_ax.data[o] + a[j] * p.lift_aa.data[o] + p.lift_b.data[o];

    for (const auto& layer : p.layers) {
        // local path
        std::vector<std::vector<double>> local(n, std::vector<double>(dv, 0.0));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t o = 0; o < dv; ++o) {
                double s = layer.b.data[o];
                for (std::size_t i = 0; i < dv; ++i) s += v[j][i] * layer.w.data[i * dv + o];
                local[j][o] = s;
            }

        // spectral path: direct DFT sums per channel
        std::vector<std::vector<complex<double>>> spec(km, std::vector<complex<double>>(dv));
        for (std::size_t k = 0; k < km; ++k)
            for (std::size_t ch = 0; ch < dv; ++ch) {
                complex<double> s = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double theta = -2.0 * std::numbers::pi * double(k) * double(j) / double(n);
                    s += v[j][ch] * complex<double>(std::cos(theta), std::sin(theta));
                }
                spec[k][ch] = s;
            }

        std::vector<std::vector<complex<double>>> mixed(km, std::vector<complex<double>>(dv));
        for (std::size_t k = 0; k < km; ++k)
            for (std::size_t l = 0; l < dv; ++l) {
                complex<double> s = 0.0;
                for (std::size_t i = 0; i < dv; ++i) {
                    const std::size_t base = 2 * ((k * dv + l) * dv + i);
                    s += complex<double>(layer.r.data[base], layer.r.data[base + 1]) * spec[k][i];
                }
                mixed[k][l] = s;
            }

        std::vector<std::vector<double>> conv(n, std::vector<double>(dv, 0.0));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t ch = 0; ch < dv; ++ch) {
                double s = mixed[0][ch].real();
                for (std::size_t k = 1; k < km; ++k) {
                    const double theta =
                        2.0 * std::numbers::pi * double(k) * double(j) / double(n);
                    const bool nyquist = (n % 2 == 0) && (k == n / 2);
                    const double w = nyquist ? 1.0 : 2.0;
                    s += w * (mixed[k][ch].real() * std::cos(theta) -
                              (nyquist ? 0.0 : mixed[k][ch].imag()) * std::sin(theta));
                }
                conv[j][ch] = s / double(n);
            }

        // post-spectral MLP, then shared activation over local + mlp
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> hidden(dv);
            for (std::size_t o = 0; o < dv; ++o) {
                double s = layer.b1.data[o];
                for (std::size_t i = 0; i < dv; ++i) s += conv[j][i] * layer.a1.data[i * dv + o];
                hidden[o] = ref_gelu(s);
            }
            for (std::size_t o = 0; o < dv; ++o) {
                double s = layer.b2.data[o];
                for (std::size_t i = 0; i < dv; ++i) s += hidden[i] * layer.a2.data[i * dv + o];
                const double pre = local[j][o] + s;
                v[j][o] = c.activation == msfno::Activation::Sine ? std::sin(pre) : ref_gelu(pre);
            }
        }
    }

    // projection: GELU hidden of width 2 d_v
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> hidden(2 * dv);
        for (std::size_t o = 0; o < 2 * dv; ++o) {
            double s = p.proj_bm.data[o];
            for (std::size_t i = 0; i < dv; ++i) s += v[j][i] * p.proj_am.data[i * 2 * dv + o];
            hidden[o] = ref_gelu(s);
        }
        double s = p.proj_bq.data[0];
        for (std::size_t i = 0; i < 2 * dv; ++i) s += hidden[i] * p.proj_aq.data[i];
        out[j] = s;
    }
    return out;
}

inline std::vector<double> reference_mscale(const msfno::MscaleParams& p,
                                            const std::vector<double>& x,
                                            const std::vector<double>& a) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 0; i < p.branches.size(); ++i) {
        const double ci = p.scales.data[i], gi = p.weights.data[i];
        std::vector<double> sx = x, sa = a;
        for (double& v : sx) v *= ci;
        for (double& v : sa) v *= ci;
        const auto branch = reference_fno(p.branches[i], sx, sa);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += gi * branch[j];
    }
    return out;
}

}  // namespace testutil
