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

#include <random>
#include <vector>

#include "bellbunch/bellbunch.hpp"

namespace bellbunch::testing {

inline ModeId mode(Port port, Polarization pol, Label label = Label::pass_one()) { return {port, pol, label}; }

inline OperatorPolynomial op(Port port, Polarization pol, Label label = Label::pass_one()) {
    return OperatorPolynomial::creation(mode(port, pol, label));
}

/// The eight HV modes of a two-pass experiment.
inline std::vector<ModeId> two_pass_modes() {
    std::vector<ModeId> modes;
    for (Port port : {Port::A, Port::B})
        for (Polarization pol : {Polarization::H, Polarization::V})
            for (Label lab : {Label::pass_one(), Label::pass_two()}) modes.push_back({port, pol, lab});
    return modes;
}

inline Complex random_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return {g(rng), g(rng)};
}

/// Random polynomial of degree <= max_degree over `modes`.
inline OperatorPolynomial random_poly(std::mt19937_64& rng, const std::vector<ModeId>& modes, int max_degree,
                                      int max_terms = 4) {
    std::uniform_int_distribution<int> n_terms(1, max_terms);
    std::uniform_int_distribution<int> degree(0, max_degree);
    std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
    OperatorPolynomial p;
    for (int t = n_terms(rng); t > 0; --t) {
        Monomial m;
        for (int d = degree(rng); d > 0; --d) m.modes.push_back(modes[pick(rng)]);
        m.coefficient = random_complex(rng);
        p += OperatorPolynomial::from_monomial(m);
    }
    return p;
}

/// Random homogeneous polynomial of exactly `degree`.
inline OperatorPolynomial random_homogeneous(std::mt19937_64& rng, const std::vector<ModeId>& modes, int degree,
                                             int max_terms = 5) {
    std::uniform_int_distribution<int> n_terms(1, max_terms);
    std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
    OperatorPolynomial p;
    for (int t = n_terms(rng); t > 0; --t) {
        Monomial m;
        for (int d = 0; d < degree; ++d) m.modes.push_back(modes[pick(rng)]);
        m.coefficient = random_complex(rng);
        p += OperatorPolynomial::from_monomial(m);
    }
    return p;
}

/// Haar-random 2x2 unitary.
inline Matrix2 random_unitary(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Complex a{g(rng), g(rng)}, b{g(rng), g(rng)};
    double n = std::sqrt(std::norm(a) + std::norm(b));
    a /= n;
    b /= n;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    Complex e = std::polar(1.0, phase(rng));
    return {{{a, b}, {-e * std::conj(b), e * std::conj(a)}}};
}

}  // namespace bellbunch::testing
