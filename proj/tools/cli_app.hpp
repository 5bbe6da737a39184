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

// Command-line front end. Kept header-only so the test suite can drive it
// in-process; bellbunch.cpp only forwards argv.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bellbunch/bellbunch.hpp"
#include "bellbunch/io.hpp"

namespace bellbunch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPhysics = 2;

inline constexpr const char* kVersion = "0.1.0";

/// Raised for invalid flag values or combinations.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string first = "psi-minus";
    std::string second = "psi-minus";
    std::string basis_a = "hv";
    std::string basis_b = "pm";
    double coherence_time = 1.0;
    double omega_cycles = 0.0;  // pump cycles per coherence time
    double dt_min = -3.0;       // units of t_c
    double dt_max = 3.0;
    int steps = 41;
    std::string phase_mode = "averaged";
    int modes = 1;
    std::vector<double> weights;
    std::vector<double> phases;
    double pass_ratio = 1.0;
    double alpha = 1.0;
    double alpha_lo = 0.6;
    double alpha_hi = 1.0;
    int max_modes = 6;
    std::string source = "psi-minus-n";
    int pairs = 2;
    double tau = 0.1;
    int n_max = 2;
    double dt = 0.0;
    std::string out;
    std::string format = "csv";
    std::string config_path;
    unsigned threads = 0;

    void validate_common() const {
        if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
        if (!(coherence_time > 0.0)) throw UsageError("--tc must be positive");
        if (!(pass_ratio > 0.0)) throw UsageError("--pass-ratio must be positive");
        if (modes < 1) throw UsageError("--modes must be at least 1");
    }

    SourceConfig source_config() const {
        SourceConfig cfg = SourceConfig::equal_weights(static_cast<std::size_t>(modes));
        if (!weights.empty()) {
            if (weights.size() != static_cast<std::size_t>(modes))
                throw UsageError("--weights needs exactly --modes entries");
            cfg.weights = weights;
        }
        if (!phases.empty()) {
            if (phases.size() != static_cast<std::size_t>(modes))
                throw UsageError("--phases needs exactly --modes entries");
            cfg.phases = phases;
        }
        cfg.pass_ratio = pass_ratio;
        cfg.tau = tau;
        cfg.validate();
        return cfg;
    }

    OverlapModel overlap() const {
        return {coherence_time, 2.0 * std::numbers::pi * omega_cycles / coherence_time};
    }

    /// Evenly spaced delays in time units; the midpoint of a symmetric range is exactly 0.
    std::vector<double> delay_grid() const {
        if (steps < 1) throw UsageError("--steps must be at least 1");
        if (steps > 1 && !(dt_max > dt_min)) throw UsageError("--dt-max must exceed --dt-min");
        std::vector<double> grid;
        for (int i = 0; i < steps; ++i) {
            double t = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
            grid.push_back((dt_min * (1.0 - t) + dt_max * t) * coherence_time);
        }
        return grid;
    }
};

namespace detail {

struct OutputFile {
    std::string path;
    std::string content;
};

/// Writes every file to a temporary sibling first, then renames, so a failure
/// never leaves partial output behind.
inline void write_all(const std::vector<OutputFile>& files) {
    namespace fs = std::filesystem;
    std::vector<fs::path> temps;
    try {
        for (const auto& f : files) {
            fs::path tmp = f.path + ".tmp";
            std::ofstream os(tmp, std::ios::binary);
            if (!os) throw std::runtime_error("cannot open " + tmp.string());
            temps.push_back(tmp);
            os << f.content;
            if (!os.flush()) throw std::runtime_error("cannot write " + tmp.string());
        }
        for (std::size_t i = 0; i < files.size(); ++i) fs::rename(temps[i], files[i].path);
    } catch (...) {
        std::error_code ec;
        for (const auto& t : temps) fs::remove(t, ec);
        throw;
    }
}

inline std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

/// Reads "key=value" lines; blank lines and lines starting with '#' are skipped.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot read config file " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
        entries.emplace_back(key, value);
    }
    return entries;
}

/// Expands `--config FILE` into "--key=value" arguments placed ahead of the
/// explicit flags. Keys that also appear on the command line are dropped, so
/// flags always win.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (!path) return args;

    std::vector<std::string> explicit_keys;
    std::size_t sub = 0;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i].starts_with("--")) {
            explicit_keys.push_back(args[i].substr(2, args[i].find('=') == std::string::npos
                                                          ? std::string::npos
                                                          : args[i].find('=') - 2));
        } else if (sub == 0) {
            sub = i;
        }
    }
    if (sub == 0) throw UsageError("--config must follow a subcommand");

    std::vector<std::string> injected;
    for (const auto& [key, value] : read_config(*path)) {
        if (key == "config") throw UsageError("config files cannot nest");
        if (std::find(explicit_keys.begin(), explicit_keys.end(), key) != explicit_keys.end()) continue;
        injected.push_back("--" + key + "=" + value);
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, injected.begin(), injected.end());
    return args;
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }
inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

template <typename T>
T parse_or_usage(T (*parse)(std::string_view), const std::string& text) {
    try {
        return parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

/// Emits a scan: CSV (+ JSON metadata sidecar) or a single JSON document.
/// Without --out the data goes to `out` and the summary to `err`.
inline void emit_scan(const RunConfig& rc, const ScanResult& scan, const nlohmann::json& extra_meta,
                      const std::string& summary, std::ostream& out, std::ostream& err) {
    auto meta = io::scan_metadata(scan);
    meta["version"] = kVersion;
    for (auto it = extra_meta.begin(); it != extra_meta.end(); ++it) meta[it.key()] = it.value();

    std::string body;
    if (rc.format == "csv") {
        body = io::scan_csv(scan);
    } else {
        auto doc = io::scan_json(scan);
        doc["metadata"] = meta;
        body = dump(doc);
    }

    if (rc.out.empty()) {
        out << body;
        err << summary;
        return;
    }
    std::vector<OutputFile> files{{rc.out, body}};
    if (rc.format == "csv") files.push_back({rc.out + ".json", dump(meta)});
    write_all(files);
    out << summary;
}

inline std::string summarize(const std::vector<double>& controls, const std::vector<double>& values) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[lo]) lo = i;
        if (values[i] > values[hi]) hi = i;
    }
    std::ostringstream os;
    os << "min " << io::format_number(values[lo]) << " at " << io::format_number(controls[lo]) << "\n"
       << "max " << io::format_number(values[hi]) << " at " << io::format_number(controls[hi]) << "\n";
    return os.str();
}

}  // namespace detail

inline int cmd_scan_delay(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    rc.validate_common();
    auto first = detail::parse_or_usage(parse_bell_kind, rc.first);
    auto second = detail::parse_or_usage(parse_bell_kind, rc.second);
    auto ba = detail::parse_or_usage(parse_basis, rc.basis_a);
    auto bb = detail::parse_or_usage(parse_basis, rc.basis_b);
    auto mode = detail::parse_or_usage(parse_phase_mode, rc.phase_mode);
    auto cfg = rc.source_config();
    auto model = rc.overlap();
    auto grid = rc.delay_grid();

    auto scan = delay_scan(first, second, ba, bb, grid, model, mode, cfg, rc.threads);
    if (!scan.has_reference()) throw NoInterferenceError("no four-fold events in the distinguishable limit");
    for (auto& c : scan.controls) c /= rc.coherence_time;

    auto zero = fourfold_expansion(first, second, cfg, 1.0, ba, bb);
    double at_zero = mode == PhaseMode::Coherent ? zero.rate(0.0) : zero.averaged_rate();

    auto values = scan.normalized();
    std::string summary = detail::summarize(scan.controls, values) +
                          "ratio P4(0)/P4(ref) " + io::format_number(at_zero / scan.reference) + "\n";
    nlohmann::json meta = {{"command", "scan-delay"},
                           {"delay_unit", "coherence_time"},
                           {"omega_cycles_per_tc", rc.omega_cycles},
                           {"zero_delay_ratio", at_zero / scan.reference}};
    detail::emit_scan(rc, scan, meta, summary, out, err);
    return kExitOk;
}

inline int cmd_table(const RunConfig& rc, std::ostream& out, std::ostream&) {
    rc.validate_common();
    auto ba = detail::parse_or_usage(parse_basis, rc.basis_a);
    auto bb = detail::parse_or_usage(parse_basis, rc.basis_b);
    if (ba == bb) throw UsageError("bases must be mutually unbiased for the bunching protocol");

    auto table = bunching_table(ba, bb);
    std::string body = rc.format == "csv" ? io::table_csv(table) : detail::dump(io::table_json(table, ba, bb));
    if (!rc.out.empty()) detail::write_all({{rc.out, body}});
    out << body;
    return kExitOk;
}

inline int cmd_modes_sweep(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    rc.validate_common();
    if (rc.max_modes < 1 || rc.max_modes > 12) throw UsageError("--max must lie in [1, 12]");
    auto ba = detail::parse_or_usage(parse_basis, rc.basis_a);
    auto bb = detail::parse_or_usage(parse_basis, rc.basis_b);
    auto scan = modes_scan(rc.max_modes, ba, bb);

    std::string body;
    if (rc.format == "csv") {
        std::ostringstream os;
        os << "modes,probability,alpha_min\n";
        for (std::size_t i = 0; i < scan.controls.size(); ++i)
            os << io::format_number(scan.controls[i]) << ',' << io::format_number(scan.probabilities[i]) << ','
               << io::format_number(alpha_min(static_cast<int>(scan.controls[i]))) << '\n';
        body = os.str();
    } else {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < scan.controls.size(); ++i)
            rows.push_back({{"modes", static_cast<int>(scan.controls[i])},
                            {"probability", scan.probabilities[i]},
                            {"alpha_min", alpha_min(static_cast<int>(scan.controls[i]))}});
        body = detail::dump(nlohmann::ordered_json{{"command", "modes-sweep"}, {"version", kVersion}, {"rows", rows}});
    }

    std::size_t peak = 0;
    for (std::size_t i = 1; i < scan.probabilities.size(); ++i)
        if (scan.probabilities[i] > scan.probabilities[peak]) peak = i;
    std::string summary = "peak at modes " + io::format_number(scan.controls[peak]) + "\n";

    if (rc.out.empty()) {
        out << body;
        err << summary;
    } else {
        detail::write_all({{rc.out, body}});
        out << summary;
    }
    return kExitOk;
}

inline int cmd_alpha_sweep(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    rc.validate_common();
    auto ba = detail::parse_or_usage(parse_basis, rc.basis_a);
    auto bb = detail::parse_or_usage(parse_basis, rc.basis_b);
    if (ba == bb) throw UsageError("bases must be mutually unbiased");
    if (rc.alpha_lo < alpha_min(2) - 1e-12) throw UsageError("--alpha-min is below the two-mode bound 0.6");
    if (rc.alpha_hi > 1.0 || !(rc.alpha_hi > rc.alpha_lo)) throw UsageError("--alpha-max must lie in (alpha-min, 1]");
    if (rc.steps < 2) throw UsageError("--steps must be at least 2");

    double root = crossover_alpha(ba, bb);
    std::vector<double> grid;
    for (int i = 0; i < rc.steps; ++i) {
        double t = static_cast<double>(i) / (rc.steps - 1);
        grid.push_back(rc.alpha_lo * (1.0 - t) + rc.alpha_hi * t);
    }
    bool present = false;
    for (double a : grid) present |= std::abs(a - root) < 1e-12;
    if (!present && root > rc.alpha_lo && root < rc.alpha_hi) {
        grid.push_back(root);
        std::sort(grid.begin(), grid.end());
    }

    auto scan = alpha_scan(grid, ba, bb);
    std::string summary = "crossover alpha " + io::format_number(root) + "\n";
    detail::emit_scan(rc, scan, {{"command", "alpha-sweep"}, {"crossover_alpha", root}}, summary, out, err);
    return kExitOk;
}

inline int cmd_visibility(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    rc.validate_common();
    if (rc.steps < 2) throw UsageError("--steps must be at least 2");
    std::vector<double> angles;
    const double quarter = std::numbers::pi / 4.0;
    for (int i = 0; i < rc.steps; ++i) angles.push_back(quarter * i / (rc.steps - 1));

    VisibilityResult v;
    if (rc.modes > 1 || !rc.weights.empty()) {
        v = visibility_scan(rc.source_config(), angles);
    } else {
        if (rc.alpha < alpha_min(2) - 1e-12 || rc.alpha > 1.0)
            throw UsageError("--alpha must lie in [0.6, 1] for a two-mode source");
        v = visibility_scan(AlphaModel{rc.alpha}, angles);
    }
    std::string summary = "visibility " + io::format_number(v.visibility) + "\n";
    detail::emit_scan(rc, v.scan, {{"command", "visibility"}, {"visibility", v.visibility}}, summary, out, err);
    return kExitOk;
}

inline int cmd_state_dump(const RunConfig& rc, std::ostream& out, std::ostream&) {
    rc.validate_common();
    FockVector state;
    if (rc.source == "psi-minus-n") {
        if (rc.pairs < 0 || rc.pairs > kMaxPairs) throw UsageError("--pairs must lie in [0, 6]");
        state = psi_minus_n(rc.pairs);
    } else if (rc.source == "single-pass") {
        if (rc.n_max < 0 || rc.n_max > kMaxPairs) throw UsageError("--n-max must lie in [0, 6]");
        state = single_pass_state(rc.tau, rc.n_max);
    } else if (rc.source == "double-pass") {
        auto first = detail::parse_or_usage(parse_bell_kind, rc.first);
        auto second = detail::parse_or_usage(parse_bell_kind, rc.second);
        state = double_pass_fourphoton(first, second, rc.dt * rc.coherence_time, rc.overlap(), rc.pass_ratio).state;
    } else if (rc.source == "multimode") {
        state = multimode_fourphoton(rc.source_config()).state;
    } else {
        throw UsageError("--source must be psi-minus-n, single-pass, double-pass or multimode");
    }
    std::string body = rc.format == "csv" ? io::to_csv(state) : detail::dump(io::to_json(state));
    if (rc.out.empty()) {
        out << body;
    } else {
        detail::write_all({{rc.out, body}});
    }
    return kExitOk;
}

/// Parses argv and dispatches. Exit codes: 0 success, 1 usage error,
/// 2 physics or convention failure.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bell-state bunching simulator for double-pass and multi-mode PDC sources", "bellbunch"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    RunConfig rc;

    auto common = [&rc](CLI::App* sub) {
        sub->add_option("--config", rc.config_path, "flat key=value file; flags override file values");
        sub->add_option("--format", rc.format, "csv or json")->capture_default_str();
        sub->add_option("--out", rc.out, "output path");
    };
    auto bases = [&rc](CLI::App* sub) {
        sub->add_option("--basis-a", rc.basis_a, "hv, pm or rl")->capture_default_str();
        sub->add_option("--basis-b", rc.basis_b, "hv, pm or rl")->capture_default_str();
    };
    auto source = [&rc](CLI::App* sub) {
        sub->add_option("--modes", rc.modes, "modes per pass")->capture_default_str();
        sub->add_option("--weights", rc.weights, "mode weights (mean 1)")->delimiter(',');
        sub->add_option("--phases", rc.phases, "mode phases in radians")->delimiter(',');
        sub->add_option("--pass-ratio", rc.pass_ratio, "pass-II amplitude relative to pass I")->capture_default_str();
    };
    auto overlap = [&rc](CLI::App* sub) {
        sub->add_option("--tc", rc.coherence_time, "coherence time")->capture_default_str();
        sub->add_option("--omega", rc.omega_cycles, "pump frequency, cycles per coherence time")->capture_default_str();
    };

    auto* scan = app.add_subcommand("scan-delay", "four-fold rate versus inter-pass delay");
    common(scan);
    bases(scan);
    source(scan);
    overlap(scan);
    scan->add_option("--first", rc.first, "pass-I Bell state")->capture_default_str();
    scan->add_option("--second", rc.second, "pass-II Bell state")->capture_default_str();
    scan->add_option("--dt-min", rc.dt_min, "smallest delay, units of t_c")->capture_default_str();
    scan->add_option("--dt-max", rc.dt_max, "largest delay, units of t_c")->capture_default_str();
    scan->add_option("--steps", rc.steps, "grid points")->capture_default_str();
    scan->add_option("--phase-mode", rc.phase_mode, "coherent or averaged")->capture_default_str();
    scan->add_option("--threads", rc.threads, "worker threads (0 = hardware)");

    auto* table = app.add_subcommand("table", "bunching/anti-bunching table for all Bell pairs");
    common(table);
    bases(table);

    auto* modes = app.add_subcommand("modes-sweep", "four-fold rate versus mode count");
    common(modes);
    bases(modes);
    modes->add_option("--max", rc.max_modes, "largest mode count")->capture_default_str();

    auto* alpha = app.add_subcommand("alpha-sweep", "zero-delay ratio versus singlet content");
    common(alpha);
    bases(alpha);
    alpha->add_option("--alpha-min", rc.alpha_lo, "smallest alpha")->capture_default_str();
    alpha->add_option("--alpha-max", rc.alpha_hi, "largest alpha")->capture_default_str();
    alpha->add_option("--steps", rc.steps, "grid points")->capture_default_str();

    auto* vis = app.add_subcommand("visibility", "four-fold rate versus analyzer angle");
    common(vis);
    vis->add_option("--alpha", rc.alpha, "singlet content of a two-mode source")->capture_default_str();
    vis->add_option("--modes", rc.modes, "mode count (overrides --alpha when > 1)")->capture_default_str();
    vis->add_option("--weights", rc.weights, "mode weights (mean 1)")->delimiter(',');
    vis->add_option("--steps", rc.steps, "angle grid points")->capture_default_str();

    auto* dumpc = app.add_subcommand("state-dump", "print a source state");
    common(dumpc);
    source(dumpc);
    overlap(dumpc);
    dumpc->add_option("--source", rc.source, "psi-minus-n, single-pass, double-pass or multimode")
        ->capture_default_str();
    dumpc->add_option("--pairs", rc.pairs, "pair count for psi-minus-n")->capture_default_str();
    dumpc->add_option("--tau", rc.tau, "interaction parameter")->capture_default_str();
    dumpc->add_option("--n-max", rc.n_max, "truncation for single-pass")->capture_default_str();
    dumpc->add_option("--first", rc.first, "pass-I Bell state")->capture_default_str();
    dumpc->add_option("--second", rc.second, "pass-II Bell state")->capture_default_str();
    dumpc->add_option("--dt", rc.dt, "delay, units of t_c")->capture_default_str();

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = detail::expand_config(std::move(args));
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (scan->parsed()) return cmd_scan_delay(rc, out, err);
        if (table->parsed()) return cmd_table(rc, out, err);
        if (modes->parsed()) return cmd_modes_sweep(rc, out, err);
        if (alpha->parsed()) return cmd_alpha_sweep(rc, out, err);
        if (vis->parsed()) return cmd_visibility(rc, out, err);
        if (dumpc->parsed()) return cmd_state_dump(rc, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kExitPhysics;
    }
    return kExitUsage;
}

}  // namespace bellbunch::cli
