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
#include <cstdio>
#include <sstream>
#include <string>

#include "bellbunch/fock.hpp"
#include "bellbunch/measurement.hpp"
#include "bellbunch/mode.hpp"
#include "bellbunch/pdc.hpp"
#include "json.hpp"

namespace bellbunch::io {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// printf-style "%.12g".
inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// FockVector <-> [{occupation: [[mode, count], ...], re, im}, ...]

inline ordered_json to_json(const FockVector& v) {
    ordered_json arr = ordered_json::array();
    for (const auto& [occ, amp] : v.amplitudes()) {
        ordered_json o = ordered_json::array();
        for (const auto& [m, n] : occ) o.push_back(ordered_json::array({to_string(m), n}));
        // + 0.0 folds negative zero
        arr.push_back({{"occupation", o}, {"re", amp.real() + 0.0}, {"im", amp.imag() + 0.0}});
    }
    return arr;
}

template <typename Json>
inline FockVector fock_from_json(const Json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("Fock vector JSON must be an array");
    FockVector v;
    for (const auto& rec : arr) {
        ModeMultiset modes;
        for (const auto& entry : rec.at("occupation")) {
            auto m = parse_mode(entry.at(0).template get<std::string>());
            int n = entry.at(1).template get<int>();
            if (n <= 0) throw std::invalid_argument("occupation counts must be positive");
            modes.insert(modes.end(), static_cast<std::size_t>(n), m);
        }
        std::sort(modes.begin(), modes.end());
        v.add(occupation_of(modes), {rec.at("re").template get<double>(), rec.at("im").template get<double>()});
    }
    return v;
}

/// One row per basis vector: "a_h:I=1;b_v:I=1",re,im
inline std::string to_csv(const FockVector& v) {
    std::ostringstream os;
    os << "occupation,re,im\n";
    for (const auto& [occ, amp] : v.amplitudes()) {
        bool first = true;
        for (const auto& [m, n] : occ) {
            if (!first) os << ';';
            os << to_string(m) << '=' << n;
            first = false;
        }
        os << ',' << format_number(amp.real()) << ',' << format_number(amp.imag()) << '\n';
    }
    return os.str();
}

/// "control,probability" rows. When `normalize` is set and the scan has a
/// reference, probabilities are divided by it.
inline std::string scan_csv(const ScanResult& r, bool normalize = true) {
    auto values = normalize ? r.normalized() : r.probabilities;
    std::ostringstream os;
    os << "control,probability\n";
    for (std::size_t i = 0; i < r.controls.size(); ++i)
        os << format_number(r.controls[i]) << ',' << format_number(values[i]) << '\n';
    return os.str();
}

inline json scan_metadata(const ScanResult& r) {
    json meta = json::object();
    meta["control"] = r.control_name;
    meta["points"] = r.controls.size();
    if (r.has_reference()) meta["reference_rate"] = r.reference;
    json extra = json::object();
    for (const auto& [k, v] : r.metadata) extra[k] = v;
    meta["parameters"] = extra;
    return meta;
}

inline json scan_json(const ScanResult& r, bool normalize = true) {
    auto values = normalize ? r.normalized() : r.probabilities;
    json rows = json::array();
    for (std::size_t i = 0; i < r.controls.size(); ++i)
        rows.push_back({{"control", r.controls[i]}, {"probability", values[i]}});
    return {{"metadata", scan_metadata(r)}, {"rows", rows}};
}

inline std::string bell_symbol(BellKind k) {
    switch (k) {
        case BellKind::PsiMinus: return "psi-";
        case BellKind::PsiPlus: return "psi+";
        case BellKind::PhiMinus: return "phi-";
        case BellKind::PhiPlus: return "phi+";
    }
    return "?";
}

inline std::string table_csv(const BunchTable& t) {
    std::ostringstream os;
    os << "pair";
    for (auto k : kAllBellKinds) os << ',' << bell_symbol(k);
    os << '\n';
    for (std::size_t i = 0; i < 4; ++i) {
        os << bell_symbol(kAllBellKinds[i]);
        for (std::size_t j = 0; j < 4; ++j) os << ',' << class_letter(t[i][j]);
        os << '\n';
    }
    return os.str();
}

inline json table_json(const BunchTable& t, BasisKind basis_a, BasisKind basis_b) {
    json order = json::array();
    for (auto k : kAllBellKinds) order.push_back(bell_symbol(k));
    json classes = json::array(), ratios = json::array();
    for (std::size_t i = 0; i < 4; ++i) {
        json crow = json::array(), rrow = json::array();
        for (std::size_t j = 0; j < 4; ++j) {
            crow.push_back(std::string(1, class_letter(t[i][j])));
            rrow.push_back(t[i][j].ratio);
        }
        classes.push_back(crow);
        ratios.push_back(rrow);
    }
    return {{"basis_a", to_string(basis_a)}, {"basis_b", to_string(basis_b)},
            {"order", order}, {"classes", classes}, {"ratios", ratios}};
}

}  // namespace bellbunch::io
