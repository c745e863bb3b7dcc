// engine.hpp
// Collision recursions for schemes A and B with carried system-ancilla
// correlations.
//
// One collision, scheme A (working space s1, s2, aR, aR_next):
//   1. append a fresh thermal ancilla aR_next to the carried (s1, s2, aR) state
//   2. apply exp(-i H_A dt) on (s1, s2, aR)
//   3. apply the partial swap on (aR, aR_next)
//   4. trace out aR and rename aR_next -> aR
// Scheme B does the same on both sides, in the working space
// (s1, s2, aL, aL_next, aR, aR_next), left swap before right swap.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qcm/density_matrix.hpp"
#include "qcm/linalg.hpp"
#include "qcm/model.hpp"

namespace qcm {

// Joint state of the system and the ancilla(e) carried into the next
// collision. `step_index` counts completed collisions.
struct CollisionState {
    DensityMatrix joint;
    long step_index = 0;
};

// Reduced system states of one run. Step 0 is the initial state; step n
// (1 <= n <= n_collisions) is the state after n collisions.
struct TrajectoryRecord {
    SchemeConfig config;
    DensityMatrix initial;
    std::vector<DensityMatrix> states;

    std::size_t size() const noexcept { return states.size(); }

    const DensityMatrix& at(long step) const {
        if (step == 0) return initial;
        if (step < 0 || static_cast<std::size_t>(step) > states.size()) {
            throw DomainError("trajectory has no step " + std::to_string(step));
        }
        return states[static_cast<std::size_t>(step - 1)];
    }
};

struct EngineOptions {
    // Skipping the ancilla-ancilla stage is only meaningful for diagnostics.
    bool ancilla_swap = true;
    Tolerances tolerances = kDefaultTolerances;
};

// Precomputes the step unitaries of one configuration and advances
// collision states. Immutable after construction; safe to share between
// threads.
class CollisionEngine {
public:
    explicit CollisionEngine(SchemeConfig config, EngineOptions options = {})
        : config_(std::move(config)), options_(options) {
        config_.validate();
        const bool b = config_.scheme == Scheme::B;

        carried_ = b ? SubsystemLayout::qubits({label::s1, label::s2, label::left, label::right})
                     : SubsystemLayout::qubits({label::s1, label::s2, label::right});
        const SubsystemLayout fresh =
            b ? SubsystemLayout::qubits({label::left_next, label::right_next})
              : SubsystemLayout::qubits({label::right_next});
        appended_ = carried_.concat(fresh);
        working_order_ = b ? std::vector<std::string>{label::s1, label::s2, label::left, label::left_next,
                                                      label::right, label::right_next}
                           : std::vector<std::string>{label::s1, label::s2, label::right, label::right_next};
        working_ = SubsystemLayout::qubits(working_order_);
        keep_ = b ? std::vector<std::string>{label::s1, label::s2, label::left_next, label::right_next}
                  : std::vector<std::string>{label::s1, label::s2, label::right_next};

        fresh_ancillae_ = detail::qubit_gibbs(config_.omega_aR, config_.beta_aR);
        if (b) {
            fresh_ancillae_ = kron(detail::qubit_gibbs(config_.omega_aL, config_.beta_aL), fresh_ancillae_);
        }

        const ComplexMatrix h = build_hamiltonian(config_, carried_);
        interaction_ = embed(unitary_from_hamiltonian(h, config_.dt, options_.tolerances), working_,
                             carried_.labels());
        const ComplexMatrix swap = detail::partial_swap(config_.theta);
        swap_right_ = embed(swap, working_, {label::right, label::right_next});
        if (b) swap_left_ = embed(swap, working_, {label::left, label::left_next});

        step_ = interaction_;
        if (options_.ancilla_swap) {
            if (b) step_ = swap_left_ * step_;
            step_ = swap_right_ * step_;
        }
        for (const auto* u : unitaries()) {
            const double r = unitarity_residual(*u);
            if (r > options_.tolerances.unitary) {
                throw InvariantViolation("step unitary deviates from unitarity by " + std::to_string(r));
            }
        }
    }

    const SchemeConfig& config() const noexcept { return config_; }
    const SubsystemLayout& carried_layout() const noexcept { return carried_; }
    const SubsystemLayout& working_layout() const noexcept { return working_; }

    // exp(-i H dt) embedded in the working space.
    const ComplexMatrix& interaction_unitary() const noexcept { return interaction_; }
    // Full one-collision unitary (swaps after the interaction).
    const ComplexMatrix& step_unitary() const noexcept { return step_; }

    std::vector<const ComplexMatrix*> unitaries() const {
        std::vector<const ComplexMatrix*> out{&interaction_, &swap_right_, &step_};
        if (config_.scheme == Scheme::B) out.push_back(&swap_left_);
        return out;
    }

    CollisionState initial_state(const DensityMatrix& system) const {
        if (system.dim() != 4) {
            throw DimensionError("system state must be a 4x4 two-qubit density matrix");
        }
        const ComplexMatrix joint = kron(system.matrix(), fresh_ancillae_);
        return {checked(joint, 0), 0};
    }

    CollisionState step(const CollisionState& state) const {
        if (state.joint.layout() != carried_) {
            throw DimensionError("collision state layout " + state.joint.layout().describe() +
                                 " does not belong to scheme " + std::string(to_string(config_.scheme)));
        }
        const ComplexMatrix extended =
            reorder(kron(state.joint.matrix(), fresh_ancillae_), appended_, working_order_);
        const ComplexMatrix evolved = step_ * extended * step_.adjoint();
        // Dropping the old ancilla leaves the fresh one in the carried slot.
        const ComplexMatrix carried = partial_trace(evolved, working_, keep_);
        return {checked(carried, state.step_index + 1), state.step_index + 1};
    }

    DensityMatrix system_state(const CollisionState& state) const {
        return DensityMatrix(partial_trace(state.joint.matrix(), carried_, {label::s1, label::s2}),
                             two_qubit_layout(), options_.tolerances);
    }

    // Runs config().n_collisions collisions; `observer`, when set, sees every
    // carried state after its collision.
    TrajectoryRecord run(const DensityMatrix& system,
                         const std::function<void(const CollisionState&)>& observer = {}) const {
        TrajectoryRecord record{config_, DensityMatrix(system.matrix(), two_qubit_layout()), {}};
        record.states.reserve(static_cast<std::size_t>(config_.n_collisions));
        CollisionState state = initial_state(system);
        for (long n = 0; n < config_.n_collisions; ++n) {
            state = step(state);
            if (observer) observer(state);
            record.states.push_back(system_state(state));
        }
        return record;
    }

private:
    DensityMatrix checked(const ComplexMatrix& m, long step) const {
        try {
            return DensityMatrix(m, carried_, options_.tolerances);
        } catch (const InvariantViolation& e) {
            throw InvariantViolation(std::string("carried joint state: ") + e.what(), step);
        }
    }

    SchemeConfig config_;
    EngineOptions options_;
    SubsystemLayout carried_;
    SubsystemLayout appended_;
    SubsystemLayout working_;
    std::vector<std::string> working_order_;
    std::vector<std::string> keep_;
    ComplexMatrix fresh_ancillae_;
    ComplexMatrix interaction_;
    ComplexMatrix swap_left_;
    ComplexMatrix swap_right_;
    ComplexMatrix step_;
};

namespace detail {

inline void require_scheme(const SchemeConfig& c, Scheme s) {
    if (c.scheme != s) {
        throw DomainError("configuration is for scheme " + std::string(to_string(c.scheme)) + ", not scheme " +
                          std::string(to_string(s)));
    }
}

}  // namespace detail

inline CollisionState init_scheme_a(const DensityMatrix& system, const SchemeConfig& config) {
    detail::require_scheme(config, Scheme::A);
    return CollisionEngine(config).initial_state(system);
}

inline CollisionState step_scheme_a(const CollisionState& state, const SchemeConfig& config) {
    detail::require_scheme(config, Scheme::A);
    return CollisionEngine(config).step(state);
}

inline CollisionState init_scheme_b(const DensityMatrix& system, const SchemeConfig& config) {
    detail::require_scheme(config, Scheme::B);
    return CollisionEngine(config).initial_state(system);
}

inline CollisionState step_scheme_b(const CollisionState& state, const SchemeConfig& config) {
    detail::require_scheme(config, Scheme::B);
    return CollisionEngine(config).step(state);
}

inline TrajectoryRecord run(const DensityMatrix& system, const SchemeConfig& config) {
    return CollisionEngine(config).run(system);
}

struct SteadyStateResult {
    DensityMatrix state;      // last reduced system state
    long steps_taken = 0;     // collisions performed
    bool converged = false;
    double last_difference = 0.0;  // trace norm of the final successive difference
};

inline constexpr double kDefaultSteadyStateTolerance = 1e-8;
inline constexpr long kDefaultSteadyStateMaxSteps = 200000;

// Iterates until the trace norm of rho_{n+1} - rho_n falls below `tol`.
// Running out of steps is reported through `converged`, not thrown.
// `observer`, when set, sees every reduced system state (step >= 1).
inline SteadyStateResult find_steady_state(const DensityMatrix& system, const SchemeConfig& config,
                                           double tol = kDefaultSteadyStateTolerance,
                                           long max_steps = kDefaultSteadyStateMaxSteps,
                                           const std::function<void(const DensityMatrix&)>& observer = {}) {
    if (!(tol > 0.0)) throw DomainError("steady-state tolerance must be positive");
    if (max_steps < 1) throw DomainError("max_steps must be at least 1");
    const CollisionEngine engine(config);
    CollisionState state = engine.initial_state(system);
    DensityMatrix previous(system.matrix(), two_qubit_layout());
    double diff = 0.0;
    for (long n = 1; n <= max_steps; ++n) {
        state = engine.step(state);
        DensityMatrix current = engine.system_state(state);
        if (observer) observer(current);
        diff = trace_norm(current.matrix() - previous.matrix());
        if (diff < tol) return {std::move(current), n, true, diff};
        previous = std::move(current);
    }
    return {std::move(previous), max_steps, false, diff};
}

}  // namespace qcm
