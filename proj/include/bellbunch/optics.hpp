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

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bellbunch/fock.hpp"
#include "bellbunch/mode.hpp"

namespace bellbunch {

enum class BasisKind : std::uint8_t { HV, PM, RL };

inline constexpr std::array<BasisKind, 3> kAllBases = {BasisKind::HV, BasisKind::PM, BasisKind::RL};

inline std::string to_string(BasisKind b) {
    switch (b) {
        case BasisKind::HV: return "hv";
        case BasisKind::PM: return "pm";
        case BasisKind::RL: return "rl";
    }
    return "?";
}

/// Accepts "hv", "pm", "rl" in any letter case.
inline BasisKind parse_basis(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "hv") return BasisKind::HV;
    if (s == "pm") return BasisKind::PM;
    if (s == "rl") return BasisKind::RL;
    throw std::invalid_argument("unknown polarization basis: " + std::string(text));
}

inline std::array<Polarization, 2> channels(BasisKind b) {
    switch (b) {
        case BasisKind::HV: return {Polarization::H, Polarization::V};
        case BasisKind::PM: return {Polarization::P, Polarization::M};
        case BasisKind::RL: return {Polarization::R, Polarization::L};
    }
    throw std::logic_error("unreachable");
}

inline std::optional<BasisKind> basis_of(Polarization p) {
    switch (p) {
        case Polarization::H:
        case Polarization::V: return BasisKind::HV;
        case Polarization::P:
        case Polarization::M: return BasisKind::PM;
        case Polarization::R:
        case Polarization::L: return BasisKind::RL;
        default: return std::nullopt;
    }
}

inline int channel_of(Polarization p) { return static_cast<int>(p) % 2; }

using Matrix2 = std::array<std::array<Complex, 2>, 2>;

inline Matrix2 matmul(const Matrix2& x, const Matrix2& y) {
    Matrix2 out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) out[i][j] += x[i][k] * y[k][j];
    return out;
}

inline Matrix2 adjoint(const Matrix2& x) {
    return {{{std::conj(x[0][0]), std::conj(x[1][0])}, {std::conj(x[0][1]), std::conj(x[1][1])}}};
}

inline bool is_unitary(const Matrix2& u, double tol = 1e-12) {
    auto g = matmul(adjoint(u), u);
    return std::abs(g[0][0] - 1.0) < tol && std::abs(g[1][1] - 1.0) < tol && std::abs(g[0][1]) < tol &&
           std::abs(g[1][0]) < tol;
}

/// Row j expresses channel j of the basis in terms of (h, v) creation operators.
/// Circular convention: r = (h + i v)/sqrt2, l = (h - i v)/sqrt2.
inline Matrix2 basis_matrix(BasisKind b) {
    const double s = std::numbers::sqrt2 / 2.0;
    const Complex i{0.0, 1.0};
    switch (b) {
        case BasisKind::HV: return {{{1.0, 0.0}, {0.0, 1.0}}};
        case BasisKind::PM: return {{{s, s}, {s, -s}}};
        case BasisKind::RL: return {{{s, s * i}, {s, -s * i}}};
    }
    throw std::logic_error("unreachable");
}

/// Linear substitution on one spatial port: from[i]† = sum_j u[i][j] to[j]†.
struct PortTransform {
    std::array<Polarization, 2> from{};
    std::array<Polarization, 2> to{};
    Matrix2 u{};
};

/// Waveplate-equivalent unitary acting on the polarization channels of zero,
/// one or both spatial ports. Labels are never touched.
class ModeTransform {
public:
    ModeTransform() = default;

    ModeTransform& set(Port port, PortTransform t) {
        if (!is_unitary(t.u)) throw std::invalid_argument("mode transform is not unitary");
        slot(port) = t;
        return *this;
    }

    const std::optional<PortTransform>& get(Port port) const { return port == Port::A ? a_ : b_; }

private:
    std::optional<PortTransform>& slot(Port port) { return port == Port::A ? a_ : b_; }

    std::optional<PortTransform> a_;
    std::optional<PortTransform> b_;
};

inline ModeTransform basis_transform(BasisKind from, BasisKind to, Port port) {
    PortTransform t{channels(from), channels(to), matmul(basis_matrix(from), adjoint(basis_matrix(to)))};
    return ModeTransform{}.set(port, t);
}

/// Arbitrary unitary from a canonical basis onto the generic (x, y) channels.
inline ModeTransform unitary_transform(Port port, BasisKind from, const Matrix2& u) {
    return ModeTransform{}.set(port, {channels(from), {Polarization::X, Polarization::Y}, u});
}

/// Linear polarization analyzer rotated by `angle` from HV:
/// x = cos h + sin v, y = -sin h + cos v. At angle pi/4 the channels are p and -m.
inline ModeTransform polarization_rotation(Port port, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Matrix2 rows{{{c, s}, {-s, c}}};
    return unitary_transform(port, BasisKind::HV, adjoint(rows));
}

/// Apply `first`, then `second`. Per port the output channels of `first`
/// must match the input channels of `second`.
inline ModeTransform compose(const ModeTransform& first, const ModeTransform& second) {
    ModeTransform out;
    for (Port port : {Port::A, Port::B}) {
        const auto& f = first.get(port);
        const auto& g = second.get(port);
        if (f && g) {
            if (f->to != g->from) throw std::invalid_argument("cannot compose: channel mismatch");
            out.set(port, {f->from, g->to, matmul(f->u, g->u)});
        } else if (f) {
            out.set(port, *f);
        } else if (g) {
            out.set(port, *g);
        }
    }
    return out;
}

/// Replaces every creation operator by `image(mode)` and re-expands.
inline OperatorPolynomial substitute(const OperatorPolynomial& p,
                                     const std::function<OperatorPolynomial(const ModeId&)>& image) {
    std::map<ModeId, OperatorPolynomial> cache;
    auto lookup = [&](const ModeId& m) -> const OperatorPolynomial& {
        auto it = cache.find(m);
        if (it == cache.end()) it = cache.emplace(m, image(m)).first;
        return it->second;
    };
    OperatorPolynomial out;
    for (const auto& [modes, c] : p.terms()) {
        OperatorPolynomial term = OperatorPolynomial::constant(c);
        for (const auto& m : modes) term = poly_mul(term, lookup(m));
        out += term;
    }
    return out;
}

inline OperatorPolynomial apply_transform(const OperatorPolynomial& p, const ModeTransform& t) {
    return substitute(p, [&](const ModeId& m) {
        const auto& pt = t.get(m.port);
        if (!pt) return OperatorPolynomial::creation(m);
        int row = -1;
        for (int i = 0; i < 2; ++i)
            if (pt->from[i] == m.pol) row = i;
        if (row < 0) throw std::invalid_argument("mode " + to_string(m) + " is not in the transform's input basis");
        OperatorPolynomial img;
        for (int j = 0; j < 2; ++j) img += OperatorPolynomial::creation({m.port, pt->to[j], m.label}, pt->u[row][j]);
        return img;
    });
}

/// Re-expresses every operator on `port` in `target`, whatever canonical basis
/// it is currently written in.
inline OperatorPolynomial change_basis(const OperatorPolynomial& p, Port port, BasisKind target) {
    return substitute(p, [&](const ModeId& m) {
        if (m.port != port) return OperatorPolynomial::creation(m);
        auto src = basis_of(m.pol);
        if (!src) throw std::invalid_argument("mode " + to_string(m) + " has no canonical basis");
        if (*src == target) return OperatorPolynomial::creation(m);
        Matrix2 u = matmul(basis_matrix(*src), adjoint(basis_matrix(target)));
        auto from = channels(*src);
        auto to = channels(target);
        int row = m.pol == from[0] ? 0 : 1;
        OperatorPolynomial img;
        for (int j = 0; j < 2; ++j) img += OperatorPolynomial::creation({m.port, to[j], m.label}, u[row][j]);
        return img;
    });
}

/// Temporal overlap between the two passes. Gaussian in the delay:
/// gamma(dt) = exp(-dt^2 / (2 t_c^2)).
struct OverlapModel {
    double coherence_time = 1.0;
    double omega = 0.0;  // pump angular frequency, rad per time unit

    void validate() const {
        if (!(coherence_time > 0.0) || !std::isfinite(coherence_time))
            throw std::invalid_argument("coherence time must be positive");
        if (!std::isfinite(omega)) throw std::invalid_argument("omega must be finite");
    }

    double gamma(double dt) const {
        double x = dt / coherence_time;
        return std::exp(-0.5 * x * x);
    }

    Complex phase(double dt) const { return std::polar(1.0, omega * dt); }
};

/// Orthogonal-complement label paired with a pass-II label.
inline Label perp_partner(const Label& l) { return Label::perp(1, l.index); }

/// Rewrites every pass-II operator c_II as gamma c_I + sqrt(1 - gamma^2) c_perp.
/// Other operators are left alone.
inline OperatorPolynomial delay_decompose(const OperatorPolynomial& p, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("overlap must lie in [0, 1]");
    const double rest = std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
    return substitute(p, [&](const ModeId& m) {
        if (m.label.kind != LabelKind::PassII) return OperatorPolynomial::creation(m);
        OperatorPolynomial img = OperatorPolynomial::creation({m.port, m.pol, Label::pass_one(m.label.index)}, gamma);
        img += OperatorPolynomial::creation({m.port, m.pol, perp_partner(m.label)}, rest);
        return img;
    });
}

struct DelayDecomposition {
    OperatorPolynomial poly;
    Complex phase;  // e^{i omega dt}; applied by the caller to the pass-II amplitude
};

inline DelayDecomposition delay_decompose(const OperatorPolynomial& p, const OverlapModel& model, double dt) {
    model.validate();
    return {delay_decompose(p, model.gamma(dt)), model.phase(dt)};
}

}  // namespace bellbunch
