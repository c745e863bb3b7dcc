// qcm: command-line front end for the collision-model library.
//
//   qcm [--threads N] run <preset> [--out DIR] [--collisions N]
//   qcm sweep --config FILE --param NAME --values v1,v2,... [--out DIR]
//   qcm measure <name> --config FILE --state NAME [--state NAME] [--out FILE]
//   qcm steady-state --config FILE --state NAME [--tol X] [--max-steps N]
//   qcm list-presets
//
// QCM_OUTPUT_DIR sets the default output directory.
// Exit codes: 0 ok, 1 usage or configuration error, 2 numerical invariant
// violated, 3 steady state not reached.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcm/qcm.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitNoConvergence = 3;

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        auto comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        const auto token = qcm::detail::trim(std::string_view(list).substr(pos, comma - pos));
        if (!token.empty()) {
            const auto v = qcm::parse_number(token);
            if (!v) throw qcm::ConfigError("not a number: '" + std::string(token) + "'", "values");
            out.push_back(*v);
        }
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-qubit collision model simulator"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    app.set_version_flag("--version", std::string(qcm::kLibraryVersion));

    std::string out_dir = ".";

    auto* run_cmd = app.add_subcommand("run", "run an experiment preset");
    std::string preset_id;
    long collisions = 0;
    run_cmd->add_option("preset", preset_id, "preset id (see list-presets)")->required();
    run_cmd->add_option("--out", out_dir, "output directory")->envname("QCM_OUTPUT_DIR");
    run_cmd->add_option("--collisions", collisions, "override the preset's collision count")
        ->check(CLI::PositiveNumber);

    auto* sweep_cmd = app.add_subcommand("sweep", "vary one configuration field");
    std::string config_path, param, values;
    std::vector<std::string> sweep_states;
    sweep_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--param", param)->required();
    sweep_cmd->add_option("--values", values, "comma-separated list")->required();
    sweep_cmd->add_option("--out", out_dir)->envname("QCM_OUTPUT_DIR");
    sweep_cmd->add_option("--state", sweep_states, "initial states (default bell_phi_plus, bell_phi_minus)");

    auto* measure_cmd = app.add_subcommand("measure", "measure time series of one configuration");
    std::string measure_name, measure_out;
    std::vector<std::string> measure_states;
    measure_cmd->add_option("name", measure_name, "trace_distance, concurrence, wigner, nonclassical_volume")
        ->required();
    measure_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    measure_cmd->add_option("--state", measure_states)->required();
    measure_cmd->add_option("--out", measure_out, "CSV file (default stdout)");

    auto* steady_cmd = app.add_subcommand("steady-state", "iterate collisions until the system state settles");
    std::string steady_state_name;
    double tol = qcm::kDefaultSteadyStateTolerance;
    long max_steps = qcm::kDefaultSteadyStateMaxSteps;
    steady_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    steady_cmd->add_option("--state", steady_state_name)->required();
    steady_cmd->add_option("--tol", tol)->check(CLI::PositiveNumber);
    steady_cmd->add_option("--max-steps", max_steps)->check(CLI::PositiveNumber);

    auto* list_cmd = app.add_subcommand("list-presets", "print the preset catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*list_cmd) {
            for (const auto& p : qcm::preset_catalog()) std::cout << p.id << "\t" << p.description << "\n";
            return 0;
        }
        if (*run_cmd) {
            qcm::RunOptions opt;
            opt.out_dir = out_dir;
            opt.threads = threads;
            if (collisions > 0) opt.n_collisions = collisions;
            for (const auto& f : qcm::run_preset(preset_id, opt).files) std::cout << f.string() << "\n";
            return 0;
        }
        if (*sweep_cmd) {
            qcm::SweepOptions opt;
            opt.out_dir = out_dir;
            opt.threads = threads;
            if (!sweep_states.empty()) {
                opt.states.clear();
                for (const auto& s : sweep_states) opt.states.push_back(qcm::parse_state_name(s));
                if (opt.states.size() < 2) opt.measures = {qcm::MeasureKind::concurrence};
            }
            const auto result = qcm::sweep(qcm::load_config(config_path), param, parse_values(values), opt);
            std::cout << result.index.string() << "\n";
            int failed = 0;
            for (const auto& e : result.entries) {
                if (!e.ok) {
                    ++failed;
                    std::cerr << "value " << qcm::format_number(e.value) << " failed: " << e.message << "\n";
                }
            }
            return failed ? kExitUsage : 0;
        }
        if (*measure_cmd) {
            const auto kind = qcm::parse_measure(measure_name);
            std::vector<qcm::StateName> states;
            for (const auto& s : measure_states) states.push_back(qcm::parse_state_name(s));
            const auto sets =
                qcm::run_trajectory_sets({qcm::load_config(config_path)}, states, {kind}, {}, threads);
            const auto csv = qcm::measure_table(sets.front(), kind).to_csv();
            if (measure_out.empty()) {
                std::cout << csv;
            } else {
                qcm::write_file_atomic(measure_out, csv);
            }
            return 0;
        }
        if (*steady_cmd) {
            const auto config = qcm::load_config(config_path);
            const auto ss = qcm::find_steady_state(qcm::named_state(steady_state_name), config, tol, max_steps);
            std::cout << "converged = " << (ss.converged ? "true" : "false") << "\n";
            std::cout << "steps = " << ss.steps_taken << "\n";
            std::cout << "last_difference = " << qcm::format_number(ss.last_difference) << "\n";
            const auto f2 = qcm::fidelity(qcm::qubit_marginal(ss.state, 2),
                                          qcm::gibbs_state(config.omega_s2, config.beta_aR));
            if (config.scheme == qcm::Scheme::B) {
                const auto f1 = qcm::fidelity(qcm::qubit_marginal(ss.state, 1),
                                              qcm::gibbs_state(config.omega_s1, config.beta_aL));
                std::cout << "F_s1 = " << qcm::format_number(f1) << "\n";
            }
            std::cout << "F_s2 = " << qcm::format_number(f2) << "\n";
            std::cout << "concurrence = " << qcm::format_number(qcm::concurrence(ss.state)) << "\n";
            return ss.converged ? 0 : kExitNoConvergence;
        }
    } catch (const qcm::InvariantViolation& e) {
        std::cerr << "invariant violation";
        if (e.step() >= 0) std::cerr << " at step " << e.step();
        std::cerr << ": " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
