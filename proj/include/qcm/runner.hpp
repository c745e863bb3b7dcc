// runner.hpp
// Experiment presets for every figure of the two-qubit collision study,
// preset runs, parameter sweeps and the metadata sidecar format.
//
// Output of a trajectory preset, per variant:
//   <id>_<variant>_<measure>.csv   step, then one column per state (or pair)
//   <id>_<variant>.meta            run metadata, then "[config]" and the
//                                  configuration in qcm-config/1 syntax
// Steady-state presets write <id>_fidelity.csv (T_a, F_s1, F_s2, steps,
// converged) and <id>.meta.

#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qcm/config_io.hpp"
#include "qcm/engine.hpp"
#include "qcm/measures.hpp"
#include "qcm/model.hpp"
#include "qcm/output.hpp"
#include "qcm/parallel.hpp"
#include "qcm/phase_space.hpp"
#include "qcm/version.hpp"

namespace qcm {

enum class MeasureKind { trace_distance, concurrence, wigner, nonclassical_volume };

inline std::string_view to_string(MeasureKind m) {
    switch (m) {
        case MeasureKind::trace_distance: return "trace_distance";
        case MeasureKind::concurrence: return "concurrence";
        case MeasureKind::wigner: return "wigner";
        case MeasureKind::nonclassical_volume: return "nonclassical_volume";
    }
    return "";
}

inline MeasureKind parse_measure(std::string_view s) {
    for (auto m : {MeasureKind::trace_distance, MeasureKind::concurrence, MeasureKind::wigner,
                   MeasureKind::nonclassical_volume}) {
        if (to_string(m) == s) return m;
    }
    throw DomainError("unknown measure '" + std::string(s) + "'");
}

// Phase-space point at which the Wigner presets sample W.
struct WignerPoint {
    double theta1 = std::numbers::pi / 2;
    double phi1 = std::numbers::pi / 6;
    double theta2 = std::numbers::pi / 2;
    double phi2 = std::numbers::pi / 6;
};

// Column suffix of a state: bell_phi_plus -> phi_plus, basis_01 -> 01.
inline std::string short_state_name(StateName s) {
    std::string n(to_string(s));
    for (std::string_view prefix : {"bell_", "basis_"}) {
        if (n.rfind(prefix, 0) == 0) return n.substr(prefix.size());
    }
    return n;
}

inline std::string column_prefix(MeasureKind m) {
    switch (m) {
        case MeasureKind::trace_distance: return "T_";
        case MeasureKind::concurrence: return "C_";
        case MeasureKind::wigner: return "W_";
        case MeasureKind::nonclassical_volume: return "delta_";
    }
    return "";
}

struct MeasureOptions {
    WignerPoint wigner_point{};
    QuadratureSpec quadrature{};
};

// Values of a single-state measure at steps 0..n of one trajectory.
inline std::vector<double> evaluate_measure(MeasureKind m, const TrajectoryRecord& t,
                                            const MeasureOptions& opt = {}) {
    std::vector<double> out;
    out.reserve(t.size() + 1);
    for (long n = 0; n <= static_cast<long>(t.size()); ++n) {
        const DensityMatrix& rho = t.at(n);
        switch (m) {
            case MeasureKind::concurrence: out.push_back(concurrence(rho)); break;
            case MeasureKind::wigner: {
                const auto& p = opt.wigner_point;
                out.push_back(wigner_two_qubit(rho, p.theta1, p.phi1, p.theta2, p.phi2));
                break;
            }
            case MeasureKind::nonclassical_volume:
                out.push_back(nonclassical_volume(rho, opt.quadrature).value);
                break;
            case MeasureKind::trace_distance:
                throw DomainError("trace distance is a two-state measure");
        }
    }
    return out;
}

// Trajectories of one configuration from several initial states, with the
// per-state measures already evaluated.
struct TrajectorySet {
    SchemeConfig config;
    std::vector<StateName> states;
    std::vector<TrajectoryRecord> runs;
    std::map<MeasureKind, std::vector<std::vector<double>>> per_state;  // [measure][state][step]
};

inline Table measure_table(const TrajectorySet& set, MeasureKind m) {
    Table t;
    t.columns.push_back("step");
    const long n = set.config.n_collisions;
    if (m == MeasureKind::trace_distance) {
        if (set.states.size() < 2) throw DomainError("trace distance needs two initial states");
        t.columns.push_back("T_" + short_state_name(set.states[0]) + "_" + short_state_name(set.states[1]));
        const auto series = distinguishability_series(set.runs[0], set.runs[1]);
        for (long s = 0; s <= n; ++s) t.rows.push_back({static_cast<double>(s), series[static_cast<std::size_t>(s)]});
        return t;
    }
    const auto& values = set.per_state.at(m);
    for (auto s : set.states) t.columns.push_back(column_prefix(m) + short_state_name(s));
    for (long s = 0; s <= n; ++s) {
        std::vector<double> row{static_cast<double>(s)};
        for (const auto& v : values) row.push_back(v[static_cast<std::size_t>(s)]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Runs every (config, state) trajectory in `jobs` on up to `threads` workers.
inline std::vector<TrajectorySet> run_trajectory_sets(const std::vector<SchemeConfig>& configs,
                                                      const std::vector<StateName>& states,
                                                      const std::vector<MeasureKind>& measures,
                                                      const MeasureOptions& opt, unsigned threads,
                                                      std::vector<std::exception_ptr>* per_config_errors = nullptr) {
    std::vector<TrajectorySet> sets(configs.size());
    for (std::size_t c = 0; c < configs.size(); ++c) {
        sets[c].config = configs[c];
        sets[c].states = states;
        for (auto m : measures) {
            if (m != MeasureKind::trace_distance) sets[c].per_state[m].resize(states.size());
        }
    }
    std::vector<std::optional<TrajectoryRecord>> runs(configs.size() * states.size());
    const auto errors = parallel_for(runs.size(), threads, [&](std::size_t i) {
        const std::size_t c = i / states.size(), s = i % states.size();
        TrajectoryRecord rec = run(named_state(states[s]), configs[c]);
        for (auto m : measures) {
            if (m != MeasureKind::trace_distance) sets[c].per_state[m][s] = evaluate_measure(m, rec, opt);
        }
        runs[i] = std::move(rec);
    });
    if (per_config_errors) {
        per_config_errors->assign(configs.size(), nullptr);
        for (std::size_t i = 0; i < errors.size(); ++i) {
            auto& slot = (*per_config_errors)[i / states.size()];
            if (errors[i] && !slot) slot = errors[i];
        }
    } else {
        rethrow_first(errors);
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i]) sets[i / states.size()].runs.push_back(std::move(*runs[i]));
    }
    return sets;
}

// ---------------------------------------------------------------------------
// Presets

struct PresetVariant {
    std::string tag;
    SchemeConfig config;
};

struct ExperimentPreset {
    std::string id;
    std::string description;
    std::vector<PresetVariant> variants;
    std::vector<StateName> initial_states;
    std::vector<MeasureKind> measures;
    // Non-empty for steady-state fidelity presets: ancilla temperatures T_a.
    std::vector<double> temperatures;
};

inline constexpr double kNonMarkovianTheta = 0.95 * std::numbers::pi / 2;

// 0.2, 0.4, ..., 10.0 without accumulated rounding.
inline std::vector<double> default_temperature_grid() {
    std::vector<double> t;
    for (int k = 1; k <= 50; ++k) t.push_back(k * 0.2);
    return t;
}

namespace detail {

inline SchemeConfig scheme_a_caption(double theta, long n) {
    SchemeConfig c;  // resonance, g_s2aR = 0.85, g_s1s2 = 0.95, dt = 0.08, beta = 1
    c.theta = theta;
    c.n_collisions = n;
    return c;
}

inline SchemeConfig scheme_b_caption(double theta, double beta_right, long n) {
    SchemeConfig c;
    c.scheme = Scheme::B;
    c.g_s1aL = 0.85;
    c.g_s2aR = 0.85;
    c.beta_aL = 1.0;
    c.beta_aR = beta_right;
    c.theta = theta;
    c.n_collisions = n;
    return c;
}

inline std::vector<PresetVariant> scheme_a_variants(long n) {
    return {{"theta_0", scheme_a_caption(0.0, n)}, {"theta_nm", scheme_a_caption(kNonMarkovianTheta, n)}};
}

inline std::vector<PresetVariant> scheme_b_variants(double beta_right, long n, const std::string& prefix = "") {
    return {{prefix + "theta_0", scheme_b_caption(0.0, beta_right, n)},
            {prefix + "theta_nm", scheme_b_caption(kNonMarkovianTheta, beta_right, n)}};
}

inline std::vector<PresetVariant> scheme_b_both_temperatures(long n) {
    auto v = scheme_b_variants(1.0, n, "equal_");
    auto w = scheme_b_variants(4.0, n, "unequal_");
    v.insert(v.end(), w.begin(), w.end());
    return v;
}

inline SchemeConfig steady_state_config(double omega_s1) {
    SchemeConfig c;
    c.scheme = Scheme::B;
    c.omega_s1 = omega_s1;
    c.omega_aL = omega_s1;
    c.g_s1s2 = 0.95;
    c.g_s1aL = 0.5;
    c.g_s2aR = 0.5;
    c.dt = 0.1;
    c.theta = kNonMarkovianTheta;
    c.n_collisions = 1;  // unused: steady-state runs stop on convergence
    return c;
}

}  // namespace detail

inline const std::vector<ExperimentPreset>& preset_catalog() {
    using S = StateName;
    using M = MeasureKind;
    static const std::vector<ExperimentPreset> catalog = [] {
        std::vector<ExperimentPreset> p;
        const std::vector<S> bell_pair{S::bell_phi_plus, S::bell_phi_minus};
        const std::vector<S> wigner_states{S::ns3_prime, S::bell_phi_plus};
        const std::vector<S> basis{S::basis_00, S::basis_01, S::basis_10, S::basis_11};
        p.push_back({"fig3", "trace distance, scheme A", detail::scheme_a_variants(500), bell_pair,
                     {M::trace_distance}, {}});
        p.push_back({"fig4a", "trace distance, scheme B, equal ancilla temperatures",
                     detail::scheme_b_variants(1.0, 500), bell_pair, {M::trace_distance}, {}});
        p.push_back({"fig4b", "trace distance, scheme B, beta_aR = 4", detail::scheme_b_variants(4.0, 500),
                     bell_pair, {M::trace_distance}, {}});
        p.push_back({"fig5a", "Wigner function at (pi/2, pi/6, pi/2, pi/6), scheme A",
                     detail::scheme_a_variants(500), wigner_states, {M::wigner}, {}});
        p.push_back({"fig5b", "Wigner function at (pi/2, pi/6, pi/2, pi/6), scheme B",
                     detail::scheme_b_both_temperatures(500), wigner_states, {M::wigner}, {}});
        {
            auto v = detail::scheme_a_variants(500);
            for (auto& x : v) x.tag = "A_" + x.tag;
            auto w = detail::scheme_b_both_temperatures(500);
            for (auto& x : w) x.tag = "B_" + x.tag;
            v.insert(v.end(), w.begin(), w.end());
            p.push_back({"fig6", "non-classical volume, schemes A and B", v, wigner_states,
                         {M::nonclassical_volume}, {}});
        }
        p.push_back({"fig7ab", "concurrence, scheme A", detail::scheme_a_variants(1000), basis, {M::concurrence},
                     {}});
        p.push_back({"fig8", "concurrence, scheme B", detail::scheme_b_both_temperatures(1000), basis,
                     {M::concurrence}, {}});
        p.push_back({"fig9a", "steady-state Gibbs fidelity vs ancilla temperature, resonant",
                     {{"resonant", detail::steady_state_config(1.0)}}, {S::basis_00}, {},
                     default_temperature_grid()});
        p.push_back({"fig9b", "steady-state Gibbs fidelity vs ancilla temperature, omega_s1 = omega_aL = 0.5",
                     {{"detuned", detail::steady_state_config(0.5)}}, {S::basis_00}, {},
                     default_temperature_grid()});
        return p;
    }();
    return catalog;
}

inline const ExperimentPreset& find_preset(std::string_view id) {
    for (const auto& p : preset_catalog()) {
        if (p.id == id) return p;
    }
    throw DomainError("unknown preset '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// Metadata sidecar

inline std::string metadata_text(const std::map<std::string, std::string>& fields, const SchemeConfig& config) {
    std::ostringstream out;
    out << "# qcm run metadata\n";
    out << "library_version = " << kLibraryVersion << "\n";
    for (const auto& [k, v] : fields) out << k << " = " << v << "\n";
    out << "[config]\n" << format_config(config);
    return out.str();
}

// Configuration recorded in a sidecar written by metadata_text.
inline SchemeConfig config_from_metadata(std::string_view text) {
    const std::string_view marker = "[config]\n";
    const auto pos = text.find(marker);
    if (pos == std::string_view::npos) throw ConfigError("metadata has no [config] section");
    return parse_config(text.substr(pos + marker.size()));
}

// ---------------------------------------------------------------------------
// Preset and sweep runs

struct RunOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 0;
    std::optional<long> n_collisions;                // overrides the preset's count
    std::optional<std::vector<double>> temperatures;  // overrides the T_a grid
    MeasureOptions measure{};
    double steady_tol = kDefaultSteadyStateTolerance;
    long steady_max_steps = kDefaultSteadyStateMaxSteps;
};

struct RunReport {
    std::vector<std::filesystem::path> files;
};

struct FidelityRow {
    double temperature;
    double f_s1;
    double f_s2;
    long steps;
    bool converged;
};

// Steady state from `initial` at each T_a (equal on both sides) and its
// fidelity with each qubit's bare Gibbs state.
inline std::vector<FidelityRow> steady_state_fidelities(const SchemeConfig& base, StateName initial,
                                                        const std::vector<double>& temperatures, double tol,
                                                        long max_steps, unsigned threads) {
    std::vector<FidelityRow> rows(temperatures.size());
    rethrow_first(parallel_for(temperatures.size(), threads, [&](std::size_t i) {
        const double T = temperatures[i];
        if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("temperature must be positive and finite");
        SchemeConfig c = base;
        c.beta_aL = c.beta_aR = 1.0 / T;
        const auto ss = find_steady_state(named_state(initial), c, tol, max_steps);
        rows[i] = {T, fidelity(qubit_marginal(ss.state, 1), gibbs_state(c.omega_s1, 1.0 / T)),
                   fidelity(qubit_marginal(ss.state, 2), gibbs_state(c.omega_s2, 1.0 / T)), ss.steps_taken,
                   ss.converged};
    }));
    return rows;
}

inline std::string join_states(const std::vector<StateName>& states) {
    std::string s;
    for (auto n : states) s += (s.empty() ? "" : ",") + std::string(to_string(n));
    return s;
}

inline RunReport run_preset(std::string_view id, const RunOptions& opt) {
    const ExperimentPreset& preset = find_preset(id);
    RunReport report;
    const auto& dir = opt.out_dir;

    if (!preset.temperatures.empty()) {
        const auto& base = preset.variants.front().config;
        const auto temps = opt.temperatures.value_or(preset.temperatures);
        const auto rows = steady_state_fidelities(base, preset.initial_states.front(), temps, opt.steady_tol,
                                                  opt.steady_max_steps, opt.threads);
        Table t{{"T_a", "F_s1", "F_s2", "steps", "converged"}, {}};
        for (const auto& r : rows) {
            t.rows.push_back({r.temperature, r.f_s1, r.f_s2, static_cast<double>(r.steps), r.converged ? 1.0 : 0.0});
        }
        const auto csv = dir / (preset.id + "_fidelity.csv");
        write_file_atomic(csv, t.to_csv());
        const auto meta = dir / (preset.id + ".meta");
        write_file_atomic(meta, metadata_text({{"preset", preset.id},
                                               {"initial_states", join_states(preset.initial_states)},
                                               {"steady_tol", format_number(opt.steady_tol)},
                                               {"steady_max_steps", std::to_string(opt.steady_max_steps)}},
                                              base));
        report.files = {csv, meta};
        return report;
    }

    std::vector<SchemeConfig> configs;
    for (const auto& v : preset.variants) {
        SchemeConfig c = v.config;
        if (opt.n_collisions) c.n_collisions = *opt.n_collisions;
        configs.push_back(c);
    }
    const auto sets = run_trajectory_sets(configs, preset.initial_states, preset.measures, opt.measure, opt.threads);
    for (std::size_t v = 0; v < sets.size(); ++v) {
        const std::string stem = preset.id + "_" + preset.variants[v].tag;
        std::string measures;
        for (auto m : preset.measures) {
            const auto path = dir / (stem + "_" + std::string(to_string(m)) + ".csv");
            write_file_atomic(path, measure_table(sets[v], m).to_csv());
            report.files.push_back(path);
            measures += (measures.empty() ? "" : ",") + std::string(to_string(m));
        }
        std::map<std::string, std::string> fields{{"preset", preset.id},
                                                  {"variant", preset.variants[v].tag},
                                                  {"initial_states", join_states(preset.initial_states)},
                                                  {"measures", measures}};
        const auto& wp = opt.measure.wigner_point;
        fields["wigner_point"] = format_number(wp.theta1) + "," + format_number(wp.phi1) + "," +
                                 format_number(wp.theta2) + "," + format_number(wp.phi2);
        fields["quadrature"] =
            std::to_string(opt.measure.quadrature.n_theta) + "x" + std::to_string(opt.measure.quadrature.n_phi);
        const auto meta = dir / (stem + ".meta");
        write_file_atomic(meta, metadata_text(fields, sets[v].config));
        report.files.push_back(meta);
    }
    return report;
}

struct SweepOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 0;
    std::vector<StateName> states{StateName::bell_phi_plus, StateName::bell_phi_minus};
    std::vector<MeasureKind> measures{MeasureKind::trace_distance, MeasureKind::concurrence};
    MeasureOptions measure{};
};

struct SweepEntry {
    double value;
    std::filesystem::path file;
    bool ok;
    std::string message;
    Table table;  // empty on failure
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::filesystem::path index;
};

// One trajectory set per value of `param`; writes sweep_<param>_<i>.csv per
// value and sweep_<param>_index.csv. A failing value is recorded in the
// index and does not stop the others.
inline SweepResult sweep(const SchemeConfig& base, std::string_view param, const std::vector<double>& values,
                         const SweepOptions& opt) {
    if (!is_numeric_field(param)) {
        throw ConfigError("cannot sweep unknown field", std::string(param));
    }
    const std::string name(param);
    SweepResult result;
    std::vector<SchemeConfig> configs;
    std::vector<std::string> setup_errors(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        SchemeConfig c = base;
        try {
            set_numeric_field(c, name, values[i]);
            c.validate();
        } catch (const Error& e) {
            setup_errors[i] = e.what();
        }
        configs.push_back(c);
    }

    // Only valid configs are run; failures are mapped back by index.
    std::vector<std::size_t> runnable;
    std::vector<SchemeConfig> to_run;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (setup_errors[i].empty()) {
            runnable.push_back(i);
            to_run.push_back(configs[i]);
        }
    }
    std::vector<std::exception_ptr> errors;
    const auto sets = run_trajectory_sets(to_run, opt.states, opt.measures, opt.measure, opt.threads, &errors);

    std::vector<SweepEntry> entries(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        entries[i].value = values[i];
        entries[i].ok = setup_errors[i].empty();
        entries[i].message = setup_errors[i];
    }
    for (std::size_t k = 0; k < runnable.size(); ++k) {
        auto& e = entries[runnable[k]];
        if (errors[k]) {
            e.ok = false;
            try {
                std::rethrow_exception(errors[k]);
            } catch (const std::exception& ex) {
                e.message = ex.what();
            }
            continue;
        }
        Table t;
        for (auto m : opt.measures) t.append_columns(measure_table(sets[k], m));
        e.file = opt.out_dir / ("sweep_" + name + "_" + std::to_string(runnable[k]) + ".csv");
        write_file_atomic(e.file, t.to_csv());
        e.table = std::move(t);
    }

    std::string index = "index," + name + ",file,status,message\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        std::string msg = entries[i].message;
        for (auto& ch : msg) {
            if (ch == ',' || ch == '\n') ch = ';';
        }
        index += std::to_string(i) + "," + format_number(entries[i].value) + "," +
                 entries[i].file.filename().string() + "," + (entries[i].ok ? "ok" : "failed") + "," + msg + "\n";
    }
    result.index = opt.out_dir / ("sweep_" + name + "_index.csv");
    write_file_atomic(result.index, index);
    result.entries = std::move(entries);
    return result;
}

}  // namespace qcm
