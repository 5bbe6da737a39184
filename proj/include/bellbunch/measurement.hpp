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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bellbunch/fock.hpp"
#include "bellbunch/optics.hpp"
#include "bellbunch/pdc.hpp"

namespace bellbunch {

/// Raised when a Bell pair shows no interference where the model requires
/// some. For ideal sources this points at a phase-convention bug.
class NoInterferenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Label-blind photon counts in the four detector channels
/// (a ch0, a ch1, b ch0, b ch1).
using ChannelCounts = std::array<int, 4>;

namespace detail {

inline void require_four_photons(const FockVector& state) {
    if (state.empty()) throw std::invalid_argument("state is empty");
    for (const auto& [occ, amp] : state.amplitudes())
        if (photon_number(occ) != 4) throw std::invalid_argument("state has support outside the four-photon sector");
}

inline ChannelCounts channel_counts(const Occupation& occ, const std::array<Polarization, 2>& ch_a,
                                    const std::array<Polarization, 2>& ch_b) {
    ChannelCounts counts{};
    for (const auto& [m, n] : occ) {
        const auto& ch = m.port == Port::A ? ch_a : ch_b;
        int offset = m.port == Port::A ? 0 : 2;
        if (m.pol == ch[0]) {
            counts[offset] += n;
        } else if (m.pol == ch[1]) {
            counts[offset + 1] += n;
        } else {
            throw std::logic_error("mode outside the detection basis");
        }
    }
    return counts;
}

inline bool is_fourfold(const ChannelCounts& c) { return c == ChannelCounts{1, 1, 1, 1}; }

inline FockVector restrict_fourfold(const FockVector& rotated, const std::array<Polarization, 2>& ch_a,
                                    const std::array<Polarization, 2>& ch_b) {
    FockVector out;
    for (const auto& [occ, amp] : rotated.amplitudes())
        if (is_fourfold(channel_counts(occ, ch_a, ch_b))) out.add(occ, amp);
    return out;
}

inline FockVector rotate(const FockVector& state, BasisKind basis_a, BasisKind basis_b) {
    auto p = change_basis(to_polynomial(state), Port::A, basis_a);
    p = change_basis(p, Port::B, basis_b);
    return apply_to_vacuum(p);
}

}  // namespace detail

/// Amplitudes of `state` (rotated into the detection bases) on every labeled
/// occupation vector that puts exactly one photon in each detector channel.
inline FockVector fourfold_amplitudes(const FockVector& state, BasisKind basis_a, BasisKind basis_b) {
    detail::require_four_photons(state);
    return detail::restrict_fourfold(detail::rotate(state, basis_a, basis_b), channels(basis_a), channels(basis_b));
}

/// Four-fold coincidence probability, incoherent over distinguishability
/// labels. For an unnormalized component this is the per-pulse rate.
inline double fourfold_probability(const FockVector& state, BasisKind basis_a, BasisKind basis_b) {
    return fourfold_amplitudes(state, basis_a, basis_b).norm_squared();
}

/// Same, with detectors defined by an explicit transform on both ports.
inline double fourfold_probability(const FockVector& state, const ModeTransform& detectors) {
    detail::require_four_photons(state);
    const auto& ta = detectors.get(Port::A);
    const auto& tb = detectors.get(Port::B);
    if (!ta || !tb) throw std::invalid_argument("detector transform must cover both ports");
    auto rotated = apply_to_vacuum(apply_transform(to_polynomial(state), detectors));
    return detail::restrict_fourfold(rotated, ta->to, tb->to).norm_squared();
}

/// Probability of every label-blind count pattern in the given bases.
inline std::map<ChannelCounts, double> detection_distribution(const FockVector& state, BasisKind basis_a,
                                                              BasisKind basis_b) {
    std::map<ChannelCounts, double> dist;
    auto rotated = detail::rotate(state, basis_a, basis_b);
    for (const auto& [occ, amp] : rotated.amplitudes())
        dist[detail::channel_counts(occ, channels(basis_a), channels(basis_b))] += std::norm(amp);
    return dist;
}

struct TermCensus {
    std::size_t terms = 0;     // occupation vectors of the state as given
    std::size_t fourfold = 0;  // of those, terms that can yield a four-fold event
};

/// Counts the non-interfering terms of a state and how many of them would
/// contribute four-fold events when observed in (basis_a, basis_b).
inline TermCensus term_census(const FockVector& state, BasisKind basis_a, BasisKind basis_b) {
    detail::require_four_photons(state);
    TermCensus c;
    for (const auto& [occ, amp] : state.amplitudes()) {
        ++c.terms;
        FockVector single;
        single.add(occ, 1.0);
        if (fourfold_probability(single, basis_a, basis_b) > kPruneTolerance) ++c.fourfold;
    }
    return c;
}

enum class PhaseMode { Coherent, Averaged };

inline std::string to_string(PhaseMode m) { return m == PhaseMode::Coherent ? "coherent" : "averaged"; }

inline PhaseMode parse_phase_mode(std::string_view text) {
    if (text == "coherent") return PhaseMode::Coherent;
    if (text == "averaged") return PhaseMode::Averaged;
    throw std::invalid_argument("unknown phase mode: " + std::string(text));
}

/// Quadrature points for averaging over the pass phase. The four-fold rate is
/// a trigonometric polynomial of degree 4 in phi, so this is exact.
inline constexpr int kPhaseQuadraturePoints = 64;

/// Four-fold amplitudes of a double pass, resolved by powers of e^{i phi}.
struct FourfoldExpansion {
    std::array<FockVector, 3> orders;

    double rate(double phi) const {
        FockVector v = orders[0];
        v += orders[1] * std::polar(1.0, phi);
        v += orders[2] * std::polar(1.0, 2.0 * phi);
        return v.norm_squared();
    }

    double averaged_rate() const {
        double s = 0.0;
        for (int k = 0; k < kPhaseQuadraturePoints; ++k)
            s += rate(2.0 * std::numbers::pi * k / kPhaseQuadraturePoints);
        return s / kPhaseQuadraturePoints;
    }

    // Orders are orthogonal after phase averaging.
    double averaged_rate_exact() const {
        return orders[0].norm_squared() + orders[1].norm_squared() + orders[2].norm_squared();
    }

    /// Upper bound on rate(phi) over all phases: (sum_k |orders[k]|)^2.
    /// Reached at zero delay, where the orders are parallel.
    double envelope() const {
        double s = orders[0].norm() + orders[1].norm() + orders[2].norm();
        return s * s;
    }
};

inline FourfoldExpansion fourfold_expansion(BellKind first, BellKind second, const SourceConfig& cfg, double gamma,
                                            BasisKind basis_a, BasisKind basis_b) {
    auto e = double_pass_expansion(first, second, cfg, gamma);
    FourfoldExpansion out;
    for (std::size_t k = 0; k < 3; ++k) {
        if (e.orders[k].empty()) continue;
        out.orders[k] = fourfold_amplitudes(e.orders[k], basis_a, basis_b);
    }
    return out;
}

/// Control grid with per-point four-fold rates (arbitrary units).
struct ScanResult {
    std::string control_name;
    std::vector<double> controls;
    std::vector<double> probabilities;
    /// Rate of the fully distinguishable (gamma = 0) configuration, or NaN
    /// where no such reference exists.
    double reference = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<std::string, std::string>> metadata;

    bool has_reference() const { return std::isfinite(reference) && reference > 0.0; }

    /// Probabilities divided by the reference rate.
    std::vector<double> normalized() const {
        if (!has_reference()) return probabilities;
        std::vector<double> out(probabilities);
        for (auto& p : out) p /= reference;
        return out;
    }
};

namespace detail {

inline void require_increasing(const std::vector<double>& grid, const char* what) {
    if (grid.empty()) throw std::invalid_argument(std::string(what) + " grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw std::invalid_argument(std::string(what) + " grid has non-finite values");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument(std::string(what) + " grid must be strictly increasing");
    }
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers; each index is
/// handled exactly once and results land in caller-owned slots.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    std::mutex error_mutex;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed = true;
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

inline double phased_rate(const FourfoldExpansion& e, PhaseMode mode, double phi) {
    return mode == PhaseMode::Coherent ? e.rate(phi) : e.averaged_rate();
}

}  // namespace detail

/// Four-fold rate versus inter-pass delay for a double pass with cfg's modes
/// in each pass. Coherent mode uses the pass phase omega*dt; Averaged mode
/// averages the rate over a uniform pass phase. The reference is the
/// fully distinguishable (gamma = 0) rate.
inline ScanResult delay_scan(BellKind first, BellKind second, BasisKind basis_a, BasisKind basis_b,
                             const std::vector<double>& grid, const OverlapModel& model, PhaseMode phase_mode,
                             const SourceConfig& cfg, unsigned threads = 0) {
    model.validate();
    cfg.validate();
    detail::require_increasing(grid, "delay");

    ScanResult r;
    r.control_name = "delay";
    r.controls = grid;
    r.probabilities.assign(grid.size(), 0.0);
    detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
        double dt = grid[i];
        auto e = fourfold_expansion(first, second, cfg, model.gamma(dt), basis_a, basis_b);
        r.probabilities[i] = detail::phased_rate(e, phase_mode, model.omega * dt);
    });
    r.reference = fourfold_expansion(first, second, cfg, 0.0, basis_a, basis_b).averaged_rate();
    r.metadata = {{"first", to_string(first)},
                  {"second", to_string(second)},
                  {"basis_a", to_string(basis_a)},
                  {"basis_b", to_string(basis_b)},
                  {"phase_mode", to_string(phase_mode)},
                  {"coherence_time", std::to_string(model.coherence_time)},
                  {"omega", std::to_string(model.omega)},
                  {"modes_per_pass", std::to_string(cfg.mode_count())},
                  {"pass_ratio", std::to_string(cfg.pass_ratio)}};
    return r;
}

struct BunchClass {
    enum class Kind { Bunching, AntiBunching };
    Kind kind = Kind::Bunching;
    double ratio = 0.0;  // P4(dt = 0) / P4(gamma = 0)
};

inline char class_letter(const BunchClass& c) { return c.kind == BunchClass::Kind::Bunching ? 'B' : 'A'; }

/// Zero-delay to distinguishable-limit four-fold ratio for an ideal
/// single-mode, balanced double pass.
inline double bunching_ratio(BellKind first, BellKind second, BasisKind basis_a, BasisKind basis_b,
                             const SourceConfig& cfg = {}) {
    double at_zero = fourfold_expansion(first, second, cfg, 1.0, basis_a, basis_b).averaged_rate();
    double reference = fourfold_expansion(first, second, cfg, 0.0, basis_a, basis_b).averaged_rate();
    if (reference < kPruneTolerance) throw NoInterferenceError("no four-fold events in the distinguishable limit");
    return at_zero / reference;
}

inline BunchClass classify_pair(BellKind first, BellKind second, BasisKind basis_a, BasisKind basis_b) {
    double ratio = bunching_ratio(first, second, basis_a, basis_b);
    if (std::abs(ratio - 1.0) < 1e-6)
        throw NoInterferenceError("no interference between " + to_string(first) + " and " + to_string(second));
    return {ratio < 1.0 ? BunchClass::Kind::Bunching : BunchClass::Kind::AntiBunching, ratio};
}

/// Rows and columns in the order psi-, psi+, phi-, phi+.
using BunchTable = std::array<std::array<BunchClass, 4>, 4>;

inline BunchTable bunching_table(BasisKind basis_a, BasisKind basis_b) {
    if (basis_a == basis_b) throw std::invalid_argument("bases must be mutually unbiased");
    BunchTable t;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            t[i][j] = classify_pair(kAllBellKinds[i], kAllBellKinds[j], basis_a, basis_b);
    return t;
}

struct VisibilityResult {
    ScanResult scan;
    double visibility = 0.0;
};

namespace detail {

inline double rotated_fourfold(const FockVector& state, double angle) {
    ModeTransform t = basis_transform(BasisKind::HV, BasisKind::HV, Port::A);
    t.set(Port::B, *polarization_rotation(Port::B, angle).get(Port::B));
    return fourfold_probability(state, t);
}

}  // namespace detail

/// Four-fold probability of a single-pass source versus the analyzer angle of
/// port B (port A fixed in HV). visibility = (R(0) - R(pi/4)) / (R(0) + R(pi/4)).
inline VisibilityResult visibility_scan(const SourceConfig& cfg, const std::vector<double>& angles) {
    detail::require_increasing(angles, "angle");
    constexpr double quarter = std::numbers::pi / 4.0;
    for (double a : angles)
        if (a < -1e-12 || a > quarter + 1e-12) throw std::invalid_argument("angles must lie in [0, pi/4]");

    auto src = multimode_fourphoton(cfg);
    VisibilityResult out;
    out.scan.control_name = "angle";
    out.scan.controls = angles;
    for (double a : angles) out.scan.probabilities.push_back(detail::rotated_fourfold(src.state, a));

    double same = detail::rotated_fourfold(src.state, 0.0);
    double orth = detail::rotated_fourfold(src.state, quarter);
    out.visibility = (same - orth) / (same + orth);
    out.scan.metadata = {{"modes", std::to_string(cfg.mode_count())},
                         {"visibility", std::to_string(out.visibility)}};
    return out;
}

inline VisibilityResult visibility_scan(const AlphaModel& alpha, const std::vector<double>& angles) {
    if (alpha.alpha == 1.0) return visibility_scan(SourceConfig::equal_weights(1), angles);
    return visibility_scan(alpha.source(), angles);
}

/// Phase-averaged P4(dt = 0) / P4(gamma = 0) for the two-mode-per-pass source
/// carrying singlet content alpha.
inline double alpha_ratio(double alpha, BasisKind basis_a, BasisKind basis_b) {
    auto cfg = AlphaModel{alpha}.source();
    double at_zero = fourfold_expansion(BellKind::PsiMinus, BellKind::PsiMinus, cfg, 1.0, basis_a, basis_b).averaged_rate();
    double reference =
        fourfold_expansion(BellKind::PsiMinus, BellKind::PsiMinus, cfg, 0.0, basis_a, basis_b).averaged_rate();
    return at_zero / reference;
}

/// Singlet content at which the zero-delay dip turns into a peak: the root of
/// P4(0) - P4(gamma = 0) on [alpha_min(2), 1], bisected to 1e-4. A root that
/// sits on the lower bound itself (within 1e-9 in the ratio) is returned as is.
inline double crossover_alpha(BasisKind basis_a, BasisKind basis_b) {
    if (basis_a == basis_b) throw std::invalid_argument("bases must be mutually unbiased");
    double lo = alpha_min(2), hi = 1.0;
    double f_lo = alpha_ratio(lo, basis_a, basis_b) - 1.0;
    double f_hi = alpha_ratio(hi, basis_a, basis_b) - 1.0;
    if (std::abs(f_lo) < 1e-9) return lo;
    if (std::abs(f_hi) < 1e-9) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) throw std::domain_error("no dip/peak crossover on [alpha_min, 1]");
    while (hi - lo > 1e-4) {
        double mid = 0.5 * (lo + hi);
        double f_mid = alpha_ratio(mid, basis_a, basis_b) - 1.0;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// alpha_ratio over a grid of singlet contents.
inline ScanResult alpha_scan(const std::vector<double>& alphas, BasisKind basis_a, BasisKind basis_b) {
    detail::require_increasing(alphas, "alpha");
    ScanResult r;
    r.control_name = "alpha";
    r.controls = alphas;
    for (double a : alphas) r.probabilities.push_back(alpha_ratio(a, basis_a, basis_b));
    r.metadata = {{"basis_a", to_string(basis_a)}, {"basis_b", to_string(basis_b)}};
    return r;
}

/// Per-pulse four-fold rate of an equally weighted n_d-mode source observed in
/// (basis_a, basis_b), for n_d = 1..max_modes.
inline ScanResult modes_scan(int max_modes, BasisKind basis_a = BasisKind::HV, BasisKind basis_b = BasisKind::PM) {
    if (max_modes < 1) throw std::invalid_argument("mode count must be at least 1");
    ScanResult r;
    r.control_name = "modes";
    for (int n = 1; n <= max_modes; ++n) {
        auto src = multimode_fourphoton(SourceConfig::equal_weights(static_cast<std::size_t>(n)));
        r.controls.push_back(n);
        r.probabilities.push_back(src.intensity * fourfold_probability(src.state, basis_a, basis_b));
    }
    r.metadata = {{"basis_a", to_string(basis_a)}, {"basis_b", to_string(basis_b)}};
    return r;
}

}  // namespace bellbunch
