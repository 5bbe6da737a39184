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

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bellbunch {

enum class Port : std::uint8_t { A, B };

// Six named channels (two per canonical basis) plus a generic pair used as
// the target of arbitrary unitaries.
enum class Polarization : std::uint8_t { H, V, P, M, R, L, X, Y };

// Distinguishing quantum number carried by a mode. Pass labels come from the
// two crystal passes; Perp labels are the orthogonal temporal components
// produced when a delayed mode is split into overlapping + orthogonal parts.
enum class LabelKind : std::uint8_t { PassI, PassII, Perp };

struct Label {
    LabelKind kind = LabelKind::PassI;
    std::uint16_t generation = 0;  // only meaningful for Perp
    std::uint16_t index = 0;       // internal source mode j

    auto operator<=>(const Label&) const = default;

    static constexpr Label pass_one(std::uint16_t j = 0) { return {LabelKind::PassI, 0, j}; }
    static constexpr Label pass_two(std::uint16_t j = 0) { return {LabelKind::PassII, 0, j}; }
    static constexpr Label perp(std::uint16_t gen, std::uint16_t j = 0) { return {LabelKind::Perp, gen, j}; }
};

// A single bosonic mode. Member order fixes the canonical total ordering
// (spatial, polarization, label).
struct ModeId {
    Port port = Port::A;
    Polarization pol = Polarization::H;
    Label label{};

    auto operator<=>(const ModeId&) const = default;
};

inline char port_char(Port p) { return p == Port::A ? 'a' : 'b'; }

inline char polarization_char(Polarization p) {
    constexpr std::string_view chars = "hvpmrlxy";
    return chars[static_cast<std::size_t>(p)];
}

inline std::string label_string(const Label& l) {
    std::string s;
    switch (l.kind) {
        case LabelKind::PassI: s = "I"; break;
        case LabelKind::PassII: s = "II"; break;
        case LabelKind::Perp: s = "perp" + std::to_string(l.generation); break;
    }
    if (l.index != 0) s += "." + std::to_string(l.index);
    return s;
}

/// Formats as "a_h:I", "b_v:II.2", "b_p:perp1".
inline std::string to_string(const ModeId& m) {
    std::string s;
    s += port_char(m.port);
    s += '_';
    s += polarization_char(m.pol);
    s += ':';
    s += label_string(m.label);
    return s;
}

namespace detail {

inline std::uint16_t parse_u16(std::string_view s, std::string_view context) {
    if (s.empty() || s.size() > 5) throw std::invalid_argument("bad mode string: " + std::string(context));
    unsigned v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw std::invalid_argument("bad mode string: " + std::string(context));
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    if (v > 0xFFFF) throw std::invalid_argument("bad mode string: " + std::string(context));
    return static_cast<std::uint16_t>(v);
}

}  // namespace detail

/// Inverse of to_string(ModeId).
inline ModeId parse_mode(std::string_view text) {
    auto fail = [&] { return std::invalid_argument("bad mode string: " + std::string(text)); };
    if (text.size() < 5 || text[1] != '_' || text[3] != ':') throw fail();

    ModeId m;
    switch (text[0]) {
        case 'a': m.port = Port::A; break;
        case 'b': m.port = Port::B; break;
        default: throw fail();
    }
    constexpr std::string_view chars = "hvpmrlxy";
    auto pos = chars.find(text[2]);
    if (pos == std::string_view::npos) throw fail();
    m.pol = static_cast<Polarization>(pos);

    std::string_view lab = text.substr(4);
    std::string_view idx;
    if (auto dot = lab.find('.'); dot != std::string_view::npos) {
        idx = lab.substr(dot + 1);
        lab = lab.substr(0, dot);
        m.label.index = detail::parse_u16(idx, text);
        if (m.label.index == 0) throw fail();
    }
    if (lab == "I") {
        m.label.kind = LabelKind::PassI;
    } else if (lab == "II") {
        m.label.kind = LabelKind::PassII;
    } else if (lab.starts_with("perp")) {
        m.label.kind = LabelKind::Perp;
        m.label.generation = detail::parse_u16(lab.substr(4), text);
    } else {
        throw fail();
    }
    return m;
}

}  // namespace bellbunch
