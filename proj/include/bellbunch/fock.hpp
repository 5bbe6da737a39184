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
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bellbunch/mode.hpp"

namespace bellbunch {

using Complex = std::complex<double>;

/// Coefficients and amplitudes below this magnitude are dropped after every
/// algebraic operation.
inline constexpr double kPruneTolerance = 1e-12;

/// Largest photon number a monomial may carry.
inline constexpr std::size_t kMaxDegree = 12;

/// Sorted multiset of modes; the canonical key of a monomial.
using ModeMultiset = std::vector<ModeId>;

/// Occupation-number vector: (mode, count) pairs sorted by mode, counts > 0.
using Occupation = std::vector<std::pair<ModeId, int>>;

inline Occupation occupation_of(const ModeMultiset& modes) {
    Occupation occ;
    for (const auto& m : modes) {
        if (!occ.empty() && occ.back().first == m) {
            ++occ.back().second;
        } else {
            occ.emplace_back(m, 1);
        }
    }
    return occ;
}

inline ModeMultiset multiset_of(const Occupation& occ) {
    ModeMultiset modes;
    for (const auto& [m, n] : occ) modes.insert(modes.end(), static_cast<std::size_t>(n), m);
    return modes;
}

inline int photon_number(const Occupation& occ) {
    int n = 0;
    for (const auto& [m, k] : occ) n += k;
    return n;
}

struct Monomial {
    ModeMultiset modes;
    Complex coefficient{1.0, 0.0};

    std::size_t degree() const { return modes.size(); }
};

/// Complex-weighted sum of products of commuting creation operators.
/// Terms are kept in canonical sorted form with duplicates merged.
class OperatorPolynomial {
public:
    using TermMap = std::map<ModeMultiset, Complex>;

    OperatorPolynomial() = default;

    static OperatorPolynomial constant(Complex c) {
        OperatorPolynomial p;
        p.add_term({}, c);
        return p;
    }

    static OperatorPolynomial creation(const ModeId& m, Complex c = 1.0) {
        OperatorPolynomial p;
        p.add_term({m}, c);
        return p;
    }

    static OperatorPolynomial from_monomial(Monomial mono) {
        std::sort(mono.modes.begin(), mono.modes.end());
        OperatorPolynomial p;
        p.add_term(std::move(mono.modes), mono.coefficient);
        return p;
    }

    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    std::size_t max_degree() const {
        std::size_t d = 0;
        for (const auto& [modes, c] : terms_) d = std::max(d, modes.size());
        return d;
    }

    std::vector<Monomial> monomials() const {
        std::vector<Monomial> out;
        out.reserve(terms_.size());
        for (const auto& [modes, c] : terms_) out.push_back({modes, c});
        return out;
    }

    Complex coefficient(const ModeMultiset& sorted_modes) const {
        auto it = terms_.find(sorted_modes);
        return it == terms_.end() ? Complex{} : it->second;
    }

    // `sorted_modes` must already be in canonical order.
    void add_term(ModeMultiset sorted_modes, Complex c) {
        if (sorted_modes.size() > kMaxDegree) {
            throw std::domain_error("monomial degree exceeds photon-number cap");
        }
        auto [it, inserted] = terms_.try_emplace(std::move(sorted_modes), c);
        if (!inserted) it->second += c;
        if (std::abs(it->second) < kPruneTolerance) terms_.erase(it);
    }

    OperatorPolynomial& operator+=(const OperatorPolynomial& other) {
        for (const auto& [modes, c] : other.terms_) add_term(modes, c);
        return *this;
    }

    OperatorPolynomial& operator-=(const OperatorPolynomial& other) {
        for (const auto& [modes, c] : other.terms_) add_term(modes, -c);
        return *this;
    }

    OperatorPolynomial& operator*=(Complex s) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            it->second *= s;
            if (std::abs(it->second) < kPruneTolerance) {
                it = terms_.erase(it);
            } else {
                ++it;
            }
        }
        return *this;
    }

    friend OperatorPolynomial operator+(OperatorPolynomial p, const OperatorPolynomial& q) { return p += q; }
    friend OperatorPolynomial operator-(OperatorPolynomial p, const OperatorPolynomial& q) { return p -= q; }
    friend OperatorPolynomial operator*(OperatorPolynomial p, Complex s) { return p *= s; }
    friend OperatorPolynomial operator*(Complex s, OperatorPolynomial p) { return p *= s; }
    friend OperatorPolynomial operator-(OperatorPolynomial p) { return p *= -1.0; }

private:
    TermMap terms_;
};

/// Distributive product. Creation operators commute, so the merged multiset
/// is the sorted union of both factors.
inline OperatorPolynomial poly_mul(const OperatorPolynomial& p, const OperatorPolynomial& q) {
    OperatorPolynomial out;
    ModeMultiset merged;
    for (const auto& [pm, pc] : p.terms()) {
        for (const auto& [qm, qc] : q.terms()) {
            merged.clear();
            std::merge(pm.begin(), pm.end(), qm.begin(), qm.end(), std::back_inserter(merged));
            out.add_term(merged, pc * qc);
        }
    }
    return out;
}

inline OperatorPolynomial operator*(const OperatorPolynomial& p, const OperatorPolynomial& q) {
    return poly_mul(p, q);
}

inline OperatorPolynomial power(const OperatorPolynomial& p, unsigned n) {
    OperatorPolynomial out = OperatorPolynomial::constant(1.0);
    for (unsigned i = 0; i < n; ++i) out = poly_mul(out, p);
    return out;
}

inline bool approx_equal(const OperatorPolynomial& p, const OperatorPolynomial& q, double tol) {
    auto diff = p - q;
    for (const auto& [m, c] : diff.terms()) {
        if (std::abs(c) > tol) return false;
    }
    return true;
}

/// Sparse state vector over occupation-number vectors.
class FockVector {
public:
    using AmplitudeMap = std::map<Occupation, Complex>;

    FockVector() = default;

    static FockVector vacuum() {
        FockVector v;
        v.add({}, 1.0);
        return v;
    }

    const AmplitudeMap& amplitudes() const { return amps_; }
    std::size_t size() const { return amps_.size(); }
    bool empty() const { return amps_.empty(); }

    Complex amplitude(const Occupation& occ) const {
        auto it = amps_.find(occ);
        return it == amps_.end() ? Complex{} : it->second;
    }

    // `occ` must be canonical (sorted, positive counts).
    void add(const Occupation& occ, Complex a) {
        auto [it, inserted] = amps_.try_emplace(occ, a);
        if (!inserted) it->second += a;
        if (std::abs(it->second) < kPruneTolerance) amps_.erase(it);
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& [occ, a] : amps_) s += std::norm(a);
        return s;
    }

    double norm() const { return std::sqrt(norm_squared()); }

    FockVector& operator+=(const FockVector& other) {
        for (const auto& [occ, a] : other.amps_) add(occ, a);
        return *this;
    }

    FockVector& operator*=(Complex s) {
        for (auto it = amps_.begin(); it != amps_.end();) {
            it->second *= s;
            if (std::abs(it->second) < kPruneTolerance) {
                it = amps_.erase(it);
            } else {
                ++it;
            }
        }
        return *this;
    }

    friend FockVector operator+(FockVector u, const FockVector& v) { return u += v; }
    friend FockVector operator*(FockVector u, Complex s) { return u *= s; }
    friend FockVector operator*(Complex s, FockVector u) { return u *= s; }

private:
    AmplitudeMap amps_;
};

namespace detail {

inline double sqrt_factorial_product(const Occupation& occ) {
    double f = 1.0;
    for (const auto& [m, n] : occ) {
        for (int k = 2; k <= n; ++k) f *= k;
    }
    return std::sqrt(f);
}

}  // namespace detail

/// Acts with p on |vac>, using (a†)^n|0> = sqrt(n!)|n>. Not normalized.
inline FockVector apply_to_vacuum(const OperatorPolynomial& p) {
    FockVector v;
    for (const auto& [modes, c] : p.terms()) {
        auto occ = occupation_of(modes);
        v.add(occ, c * detail::sqrt_factorial_product(occ));
    }
    return v;
}

/// Inverse of apply_to_vacuum: the polynomial P with P|vac> = v.
inline OperatorPolynomial to_polynomial(const FockVector& v) {
    OperatorPolynomial p;
    for (const auto& [occ, a] : v.amplitudes()) {
        p.add_term(multiset_of(occ), a / detail::sqrt_factorial_product(occ));
    }
    return p;
}

/// <u|v>, conjugate-linear in u.
inline Complex inner_product(const FockVector& u, const FockVector& v) {
    const auto& small = u.size() <= v.size() ? u.amplitudes() : v.amplitudes();
    const bool u_small = u.size() <= v.size();
    Complex s{};
    for (const auto& [occ, a] : small) {
        Complex b = u_small ? v.amplitude(occ) : u.amplitude(occ);
        s += u_small ? std::conj(a) * b : std::conj(b) * a;
    }
    return s;
}

inline FockVector normalize(const FockVector& v) {
    double n = v.norm();
    if (n == 0.0 || v.empty()) throw std::domain_error("cannot normalize: empty four-photon component");
    return v * Complex(1.0 / n);
}

}  // namespace bellbunch
