// Copyright 2026 The bellbunch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bellbunch/fock.hpp"
#include "bellbunch/mode.hpp"
#include "bellbunch/optics.hpp"

namespace bellbunch {

enum class BellKind : std::uint8_t { PsiMinus, PsiPlus, PhiMinus, PhiPlus };

/// Row/column order used by every bunching table.
inline constexpr std::array<BellKind, 4> kAllBellKinds = {BellKind::PsiMinus, BellKind::PsiPlus,
                                                          BellKind::PhiMinus, BellKind::PhiPlus};

inline std::string to_string(BellKind k) {
    switch (k) {
        case BellKind::PsiMinus: return "psi-minus";
        case BellKind::PsiPlus: return "psi-plus";
        case BellKind::PhiMinus: return "phi-minus";
        case BellKind::PhiPlus: return "phi-plus";
    }
    return "?";
}

inline BellKind parse_bell_kind(std::string_view text) {
    for (auto k : kAllBellKinds)
        if (text == to_string(k)) return k;
    throw std::invalid_argument("unknown Bell state: " + std::string(text));
}

/// Pair creator for one Bell state, all four operators carrying `label`.
///   psi+- = (a_h b_v +- a_v b_h)/sqrt2,  phi+- = (a_h b_h +- a_v b_v)/sqrt2
inline OperatorPolynomial bell_ladder(BellKind kind, Label label) {
    const double s = std::numbers::sqrt2 / 2.0;
    auto op = [&](Port port, Polarization pol) { return OperatorPolynomial::creation({port, pol, label}); };
    auto ah = op(Port::A, Polarization::H), av = op(Port::A, Polarization::V);
    auto bh = op(Port::B, Polarization::H), bv = op(Port::B, Polarization::V);
    switch (kind) {
        case BellKind::PsiMinus: return s * (ah * bv - av * bh);
        case BellKind::PsiPlus: return s * (ah * bv + av * bh);
        case BellKind::PhiMinus: return s * (ah * bh - av * bv);
        case BellKind::PhiPlus: return s * (ah * bh + av * bv);
    }
    throw std::logic_error("unreachable");
}

inline constexpr int kMaxPairs = 6;

/// Normalized n-pair singlet term
///   1/sqrt(n+1) sum_m (-1)^m |n-m, m>_a |m, n-m>_b
/// written directly in the occupation basis on pass-I modes.
inline FockVector psi_minus_n(int n) {
    if (n < 0 || n > kMaxPairs) throw std::domain_error("pair count out of range [0, 6]");
    const Label lab = Label::pass_one();
    const double amp = 1.0 / std::sqrt(n + 1.0);
    FockVector v;
    for (int m = 0; m <= n; ++m) {
        Occupation occ;
        auto push = [&](Port port, Polarization pol, int count) {
            if (count > 0) occ.emplace_back(ModeId{port, pol, lab}, count);
        };
        push(Port::A, Polarization::H, n - m);
        push(Port::A, Polarization::V, m);
        push(Port::B, Polarization::H, m);
        push(Port::B, Polarization::V, n - m);
        v.add(occ, (m % 2 == 0 ? 1.0 : -1.0) * amp);
    }
    return v;
}

/// Single-pass PDC output truncated at n_max pairs. The weight of the n-pair
/// subspace is (n+1) tanh^{2n}(tau) / cosh^4(tau). Not renormalized.
inline FockVector single_pass_state(double tau, int n_max) {
    if (n_max < 0 || n_max > kMaxPairs) throw std::domain_error("n_max out of range [0, 6]");
    if (!std::isfinite(tau)) throw std::invalid_argument("tau must be finite");
    const double ch = std::cosh(tau), th = std::tanh(tau);
    FockVector out;
    for (int n = 0; n <= n_max; ++n) {
        double c = std::sqrt(n + 1.0) * std::pow(th, n) / (ch * ch);
        out += psi_minus_n(n) * Complex(c);
    }
    return out;
}

/// Source description shared by the multi-mode and double-pass builders.
struct SourceConfig {
    double tau = 0.1;          // single-pass interaction strength
    double kappa = 1.0;        // overall coupling; rates scale as kappa^4
    std::vector<double> weights{1.0};  // c_j, mean 1
    std::vector<double> phases{};      // theta_j; empty means all zero
    double pass_ratio = 1.0;   // pass-II amplitude relative to pass I

    std::size_t mode_count() const { return weights.size(); }

    double phase(std::size_t j) const { return phases.empty() ? 0.0 : phases[j]; }

    static SourceConfig equal_weights(std::size_t n_d) {
        SourceConfig cfg;
        cfg.weights.assign(n_d, 1.0);
        return cfg;
    }

    void validate() const {
        if (weights.empty()) throw std::invalid_argument("mode count must be at least 1");
        if (!phases.empty() && phases.size() != weights.size())
            throw std::invalid_argument("phases and weights differ in length");
        double sum = 0.0;
        for (double c : weights) {
            if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("mode weights must be nonnegative");
            sum += c;
        }
        if (std::abs(sum / static_cast<double>(weights.size()) - 1.0) > 1e-12)
            throw std::invalid_argument("mode weights must average to 1");
        if (!(pass_ratio > 0.0) || !std::isfinite(pass_ratio)) throw std::invalid_argument("pass ratio must be positive");
        if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive");
    }
};

/// Pair-emission operator of one pass: (kappa/n_d) sum_j c_j e^{i theta_j} G_j.
inline OperatorPolynomial source_operator(BellKind kind, const SourceConfig& cfg, LabelKind pass) {
    const auto n_d = cfg.mode_count();
    OperatorPolynomial h;
    for (std::size_t j = 0; j < n_d; ++j) {
        Label lab{pass, 0, static_cast<std::uint16_t>(j)};
        h += bell_ladder(kind, lab) * (cfg.kappa / static_cast<double>(n_d) * std::polar(cfg.weights[j], cfg.phase(j)));
    }
    return h;
}

/// A normalized four-photon state together with the squared norm of the
/// unnormalized component it came from (the per-pulse four-photon weight C).
struct FourPhotonState {
    FockVector state;
    double intensity = 0.0;
};

inline FourPhotonState make_four_photon(const FockVector& raw) {
    double c = raw.norm_squared();
    return {normalize(raw), c};
}

/// Multi-mode single-pass source: (1/n_d sum_j c_j e^{i theta_j} L_j)^2 |vac>.
inline FourPhotonState multimode_fourphoton(const SourceConfig& cfg, BellKind kind = BellKind::PsiMinus) {
    cfg.validate();
    auto h = source_operator(kind, cfg, LabelKind::PassI);
    return make_four_photon(apply_to_vacuum(poly_mul(h, h)));
}

/// Four-photon component of a double pass, split by powers of the pass phase:
///   state(phi) = orders[0] + e^{i phi} orders[1] + e^{2 i phi} orders[2].
/// Built from H = (H_I + r e^{i phi} H_II)/2 with the pass-II modes already
/// split by the temporal overlap gamma. Unnormalized.
struct PhaseExpansion {
    std::array<FockVector, 3> orders;

    FockVector at(double phi) const {
        FockVector v = orders[0];
        v += orders[1] * std::polar(1.0, phi);
        v += orders[2] * std::polar(1.0, 2.0 * phi);
        return v;
    }
};

inline PhaseExpansion double_pass_expansion(BellKind first, BellKind second, const SourceConfig& cfg, double gamma) {
    cfg.validate();
    auto h1 = source_operator(first, cfg, LabelKind::PassI) * Complex(0.5);
    auto h2 = delay_decompose(source_operator(second, cfg, LabelKind::PassII), gamma) * Complex(0.5 * cfg.pass_ratio);
    PhaseExpansion e;
    e.orders[0] = apply_to_vacuum(poly_mul(h1, h1));
    e.orders[1] = apply_to_vacuum(poly_mul(h1, h2) * Complex(2.0));
    e.orders[2] = apply_to_vacuum(poly_mul(h2, h2));
    return e;
}

/// (G1_I + r e^{i omega dt} G2_II)^2 |vac> / 4 with pass II delay-split, normalized.
inline FourPhotonState double_pass_fourphoton(BellKind first, BellKind second, double dt, const OverlapModel& model,
                                              double pass_ratio = 1.0) {
    model.validate();
    SourceConfig cfg;
    cfg.pass_ratio = pass_ratio;
    auto e = double_pass_expansion(first, second, cfg, model.gamma(dt));
    return make_four_photon(e.at(model.omega * dt));
}

/// Normalization of the two-mode state (c1 L1 + c2 L2)^2 |vac> / 4, with the
/// weights rescaled to mean 1: C = (3 c1^4 + 4 c1^2 c2^2 + 3 c2^4) / 16.
inline double two_mode_normalization(double c1, double c2) {
    return (3.0 * std::pow(c1, 4) + 4.0 * c1 * c1 * c2 * c2 + 3.0 * std::pow(c2, 4)) / 16.0;
}

/// Pure two-pair singlet content of a two-mode source: 3 (c1^4 + c2^4) / (16 C).
inline double alpha_of_weights(double c1, double c2) {
    if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    double mean = 0.5 * (c1 + c2);
    if (mean == 0.0) throw std::invalid_argument("weights are both zero");
    c1 /= mean;
    c2 /= mean;
    return 3.0 * (std::pow(c1, 4) + std::pow(c2, 4)) / (16.0 * two_mode_normalization(c1, c2));
}

/// Lower bound 3/(2 n_d + 1) on the singlet content of an n_d-mode source.
inline double alpha_min(int n_d) {
    if (n_d < 1) throw std::invalid_argument("mode count must be at least 1");
    return 3.0 / (2.0 * n_d + 1.0);
}

/// Smallest mode count whose lower bound admits the given singlet content.
inline int min_modes_for_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    int n = 1;
    while (alpha_min(n) > alpha) ++n;
    return n;
}

/// Four-fold rate per pulse of an equally weighted n_d-mode source at
/// mutually unbiased bases: (n_d - 1) / (2 n_d^3).
inline double p4_scaling(int n_d) {
    if (n_d < 1) throw std::invalid_argument("mode count must be at least 1");
    double n = n_d;
    return (n - 1.0) / (2.0 * n * n * n);
}

/// Singlet content alpha of a two-mode source with weights (c1, c2).
struct AlphaModel {
    double alpha = 1.0;

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    }

    /// Two-mode weights (1 + d, 1 - d) reproducing alpha, found by bisection
    /// on d in [0, 1] (well below 1e-10). Requires alpha_min(2) <= alpha <= 1.
    std::array<double, 2> weights() const {
        validate();
        if (alpha < alpha_min(2) - 1e-12)
            throw std::domain_error("alpha below the two-mode bound 0.6");
        if (alpha >= 1.0) return {2.0, 0.0};
        // alpha_of_weights increases with d; bisect to the resolution of a double
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            double mid = 0.5 * (lo + hi);
            if (alpha_of_weights(1.0 + mid, 1.0 - mid) < alpha) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        double d = 0.5 * (lo + hi);
        return {1.0 + d, 1.0 - d};
    }

    SourceConfig source() const {
        auto w = weights();
        SourceConfig cfg;
        cfg.weights = {w[0], w[1]};
        return cfg;
    }
};

inline SourceConfig state_from_alpha(double alpha) { return AlphaModel{alpha}.source(); }

}  // namespace bellbunch
