// model.hpp
// Physical parameters, Hamiltonians, partial-swap gates and the library of
// named two-qubit initial states.
//
// Conventions: sigma_z = diag(1, -1), so |0> carries energy +omega and a
// thermal qubit has its large population on |1>. Tensor factors are ordered
// s1, s2, left ancillae, right ancillae.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcm/density_matrix.hpp"
#include "qcm/linalg.hpp"

namespace qcm {

namespace label {
inline const std::string s1 = "s1";
inline const std::string s2 = "s2";
inline const std::string left = "aL";
inline const std::string right = "aR";
inline const std::string left_next = "aL_next";
inline const std::string right_next = "aR_next";
}  // namespace label

enum class Scheme { A, B };

inline std::string_view to_string(Scheme s) { return s == Scheme::A ? "A" : "B"; }

inline std::optional<Scheme> parse_scheme(std::string_view s) {
    if (s == "A" || s == "a") return Scheme::A;
    if (s == "B" || s == "b") return Scheme::B;
    return std::nullopt;
}

// Every physical parameter of one collision-model run (hbar = k_B = 1).
// Defaults are the scheme-A trace-distance setup at resonance.
struct SchemeConfig {
    Scheme scheme = Scheme::A;
    double omega_s1 = 1.0;
    double omega_s2 = 1.0;
    double omega_aL = 1.0;
    double omega_aR = 1.0;
    double g_s1s2 = 0.95;
    double g_s1aL = 0.0;
    double g_s2aR = 0.85;
    double theta = 0.0;  // ancilla-ancilla partial-swap strength
    double dt = 0.08;
    double beta_aL = 1.0;
    double beta_aR = 1.0;
    long n_collisions = 500;
    // Lets a scheme-A config carry non-neutral left-ancilla values.
    bool allow_unused_left_fields = false;

    friend bool operator==(const SchemeConfig&, const SchemeConfig&) = default;

    void validate() const {
        auto finite = [](double v, const char* name) {
            if (!std::isfinite(v)) throw ConfigError("must be finite", name);
        };
        finite(omega_s1, "omega_s1");
        finite(omega_s2, "omega_s2");
        finite(omega_aL, "omega_aL");
        finite(omega_aR, "omega_aR");
        finite(g_s1s2, "g_s1s2");
        finite(g_s1aL, "g_s1aL");
        finite(g_s2aR, "g_s2aR");
        if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
            throw ConfigError("must lie in [0, pi/2], got " + std::to_string(theta), "theta");
        }
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw ConfigError("must be positive and finite", "dt");
        }
        if (!(beta_aL > 0.0) || !std::isfinite(beta_aL)) {
            throw ConfigError("must be positive and finite", "beta_aL");
        }
        if (!(beta_aR > 0.0) || !std::isfinite(beta_aR)) {
            throw ConfigError("must be positive and finite", "beta_aR");
        }
        if (n_collisions < 1) {
            throw ConfigError("must be at least 1", "n_collisions");
        }
        if (scheme == Scheme::A && !allow_unused_left_fields) {
            const SchemeConfig neutral;
            if (omega_aL != neutral.omega_aL) {
                throw ConfigError("is unused by scheme A; set allow_unused_left_fields to keep it", "omega_aL");
            }
            if (g_s1aL != neutral.g_s1aL) {
                throw ConfigError("is unused by scheme A; set allow_unused_left_fields to keep it", "g_s1aL");
            }
            if (beta_aL != neutral.beta_aL) {
                throw ConfigError("is unused by scheme A; set allow_unused_left_fields to keep it", "beta_aL");
            }
        }
    }
};

// Numeric fields addressable by name (config files, sweeps).
inline constexpr std::array<std::string_view, 12> kNumericFields = {
    "omega_s1", "omega_s2", "omega_aL", "omega_aR", "g_s1s2", "g_s1aL",
    "g_s2aR",   "theta",    "dt",       "beta_aL",  "beta_aR", "n_collisions"};

inline bool is_numeric_field(std::string_view name) {
    for (auto f : kNumericFields) {
        if (f == name) return true;
    }
    return false;
}

inline double* numeric_field(SchemeConfig& c, std::string_view name) {
    if (name == "omega_s1") return &c.omega_s1;
    if (name == "omega_s2") return &c.omega_s2;
    if (name == "omega_aL") return &c.omega_aL;
    if (name == "omega_aR") return &c.omega_aR;
    if (name == "g_s1s2") return &c.g_s1s2;
    if (name == "g_s1aL") return &c.g_s1aL;
    if (name == "g_s2aR") return &c.g_s2aR;
    if (name == "theta") return &c.theta;
    if (name == "dt") return &c.dt;
    if (name == "beta_aL") return &c.beta_aL;
    if (name == "beta_aR") return &c.beta_aR;
    return nullptr;
}

inline double get_numeric_field(const SchemeConfig& c, std::string_view name) {
    if (name == "n_collisions") return static_cast<double>(c.n_collisions);
    SchemeConfig copy = c;
    if (const double* field = numeric_field(copy, name)) return *field;
    throw ConfigError("unknown configuration field", std::string(name));
}

// Sets a numeric field; n_collisions must receive an integral value.
inline void set_numeric_field(SchemeConfig& c, std::string_view name, double value) {
    if (name == "n_collisions") {
        if (value != std::floor(value) || !std::isfinite(value)) {
            throw ConfigError("must be an integer", "n_collisions");
        }
        c.n_collisions = static_cast<long>(value);
        return;
    }
    double* field = numeric_field(c, name);
    if (!field) throw ConfigError("unknown configuration field", std::string(name));
    *field = value;
}

namespace detail {

inline ComplexMatrix qubit_gibbs(double omega, double beta) {
    if (!std::isfinite(beta) || !std::isfinite(omega)) {
        throw DomainError("inverse temperature and frequency must be finite");
    }
    if (!(beta > 0.0)) {
        throw DomainError("inverse temperature must be positive");
    }
    // Populations of H = omega sigma_z written to avoid overflow at large beta.
    const double excited = 1.0 / (1.0 + std::exp(2.0 * beta * omega));
    const double ground = 1.0 / (1.0 + std::exp(-2.0 * beta * omega));
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = excited;
    m(1, 1) = ground;
    return m;
}

inline ComplexMatrix swap_gate() {
    return 0.5 * (kron(pauli::x(), pauli::x()) + kron(pauli::y(), pauli::y()) + kron(pauli::z(), pauli::z()) +
                  identity(4));
}

// cos(theta) I - i sin(theta) SWAP for any real theta.
inline ComplexMatrix partial_swap(double theta) {
    return std::cos(theta) * identity(4) - kI * std::sin(theta) * swap_gate();
}

inline ComplexMatrix xy_coupling() {
    return kron(pauli::x(), pauli::x()) + kron(pauli::y(), pauli::y());
}

}  // namespace detail

// exp(-beta omega sigma_z) / Z for one ancilla.
inline DensityMatrix thermal_ancilla(double omega, double beta) {
    return DensityMatrix(detail::qubit_gibbs(omega, beta), SubsystemLayout::qubits({"a"}));
}

// H_A or H_B embedded in `layout`, which must contain s1, s2, aR (and aL
// for scheme B) as qubits; any further factors get the identity.
inline ComplexMatrix build_hamiltonian(const SchemeConfig& c, const SubsystemLayout& layout) {
    std::vector<std::string> required{label::s1, label::s2, label::right};
    if (c.scheme == Scheme::B) required.push_back(label::left);
    for (const auto& l : required) {
        const auto i = layout.find(l);
        if (!i) {
            throw DimensionError("scheme " + std::string(to_string(c.scheme)) + " layout " + layout.describe() +
                                 " lacks subsystem '" + l + "'");
        }
        if (layout.dims()[*i] != 2) throw DimensionError("subsystem '" + l + "' is not a qubit");
    }
    if (c.scheme == Scheme::A && layout.contains(label::left)) {
        throw DimensionError("scheme A has no left ancilla but layout " + layout.describe() + " has one");
    }

    const auto z = pauli::z();
    const auto xy = detail::xy_coupling();
    ComplexMatrix h = c.omega_s1 * embed(z, layout, {label::s1}) + c.omega_s2 * embed(z, layout, {label::s2}) +
                      c.omega_aR * embed(z, layout, {label::right}) +
                      c.g_s1s2 * embed(xy, layout, {label::s1, label::s2}) +
                      c.g_s2aR * embed(xy, layout, {label::s2, label::right});
    if (c.scheme == Scheme::B) {
        h += c.omega_aL * embed(z, layout, {label::left}) + c.g_s1aL * embed(xy, layout, {label::s1, label::left});
    }
    return h;
}

inline ComplexMatrix partial_swap_unitary(double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
        throw DomainError("partial-swap strength must lie in [0, pi/2], got " + std::to_string(theta));
    }
    return detail::partial_swap(theta);
}

// ---------------------------------------------------------------------------
// Named initial states. The negative-state coefficients are stored at their
// printed three-digit precision and renormalized on load.

enum class StateName {
    bell_phi_plus,
    bell_phi_minus,
    bell_psi_plus,
    bell_psi_minus,
    basis_00,
    basis_01,
    basis_10,
    basis_11,
    ns1,
    ns2,
    ns3,
    ns3_prime,
    ns3_double_prime,
};

inline constexpr std::array<std::string_view, 13> kStateNames = {
    "bell_phi_plus", "bell_phi_minus", "bell_psi_plus", "bell_psi_minus", "basis_00",  "basis_01",
    "basis_10",      "basis_11",       "ns1",           "ns2",            "ns3",       "ns3_prime",
    "ns3_double_prime"};

inline std::string_view to_string(StateName n) { return kStateNames[static_cast<std::size_t>(n)]; }

inline StateName parse_state_name(std::string_view s) {
    for (std::size_t i = 0; i < kStateNames.size(); ++i) {
        if (kStateNames[i] == s) return static_cast<StateName>(i);
    }
    throw DomainError("unknown state name '" + std::string(s) + "'");
}

// Unnormalized amplitudes in the basis |00>, |01>, |10>, |11>.
inline ComplexVector raw_state_vector(StateName n) {
    const double r = 1.0 / std::numbers::sqrt2;
    ComplexVector v(4);
    switch (n) {
        case StateName::bell_phi_plus: v << r, 0.0, 0.0, r; break;
        case StateName::bell_phi_minus: v << r, 0.0, 0.0, -r; break;
        case StateName::bell_psi_plus: v << 0.0, r, r, 0.0; break;
        case StateName::bell_psi_minus: v << 0.0, r, -r, 0.0; break;
        case StateName::basis_00: v << 1.0, 0.0, 0.0, 0.0; break;
        case StateName::basis_01: v << 0.0, 1.0, 0.0, 0.0; break;
        case StateName::basis_10: v << 0.0, 0.0, 1.0, 0.0; break;
        case StateName::basis_11: v << 0.0, 0.0, 0.0, 1.0; break;
        case StateName::ns1:
            v << -0.743, Complex(-0.357, 0.357), Complex(0.102, 0.102), -0.414;
            break;
        case StateName::ns2:
            v << 0.788, Complex(-0.288, 0.288), Complex(-0.288, -0.288), -0.211;
            break;
        case StateName::ns3: {
            const double l = 0.0508;
            v << -l, Complex(0.631, -0.228), Complex(-0.279, -0.682), l;
            break;
        }
        case StateName::ns3_prime: {
            const double x = 0.575;
            v << -x, Complex(-0.346, 0.310), Complex(-0.265, -0.229), x;
            break;
        }
        case StateName::ns3_double_prime:
            v << 0.0, kI * r, r, 0.0;
            break;
    }
    return v;
}

inline ComplexVector named_state_vector(StateName n) {
    const ComplexVector v = raw_state_vector(n);
    return v / v.norm();
}

inline DensityMatrix named_state(StateName n) {
    return DensityMatrix::pure(named_state_vector(n), two_qubit_layout());
}

inline DensityMatrix named_state(std::string_view name) { return named_state(parse_state_name(name)); }

}  // namespace qcm
