// measures.hpp
// Scalar measures on reduced system states: trace distance and its revival
// count, concurrence, fidelity.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcm/density_matrix.hpp"
#include "qcm/engine.hpp"
#include "qcm/linalg.hpp"
#include "qcm/model.hpp"

namespace qcm {

// Per-collision values of one named measure, sorted by step.
class MeasureSeries {
public:
    MeasureSeries() = default;
    explicit MeasureSeries(std::string name, std::optional<SchemeConfig> config = std::nullopt)
        : name_(std::move(name)), config_(std::move(config)) {}

    void push(long step, double value) {
        if (!std::isfinite(value)) {
            throw InvariantViolation("measure '" + name_ + "' is not finite", step);
        }
        if (!values_.empty() && step <= values_.back().first) {
            throw DomainError("measure '" + name_ + "' steps must increase");
        }
        values_.emplace_back(step, value);
    }

    const std::string& name() const noexcept { return name_; }
    const std::optional<SchemeConfig>& config() const noexcept { return config_; }
    const std::vector<std::pair<long, double>>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i].second; }

    double max() const {
        double m = -INFINITY;
        for (const auto& [step, v] : values_) m = std::max(m, v);
        return m;
    }

private:
    std::string name_;
    std::optional<SchemeConfig> config_;
    std::vector<std::pair<long, double>> values_;
};

inline void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("states have different dimensions (" + std::to_string(a.dim()) + " vs " +
                             std::to_string(b.dim()) + ")");
    }
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dim(rho, sigma);
    return std::clamp(0.5 * trace_norm(rho.matrix() - sigma.matrix()), 0.0, 1.0);
}

// Measure evaluated at every step of one trajectory.
inline MeasureSeries measure_series(std::string name, const TrajectoryRecord& t,
                                    const std::function<double(const DensityMatrix&)>& f) {
    MeasureSeries s(std::move(name), t.config);
    for (long n = 0; n <= static_cast<long>(t.size()); ++n) s.push(n, f(t.at(n)));
    return s;
}

// T(rho_n, rho'_n) for two runs of the same configuration.
inline MeasureSeries distinguishability_series(const TrajectoryRecord& a, const TrajectoryRecord& b,
                                               std::string name = "trace_distance") {
    if (!(a.config == b.config)) {
        throw DomainError("distinguishability needs two trajectories of the same configuration");
    }
    if (a.size() != b.size()) throw DimensionError("trajectories have different lengths");
    MeasureSeries s(std::move(name), a.config);
    for (long n = 0; n <= static_cast<long>(a.size()); ++n) s.push(n, trace_distance(a.at(n), b.at(n)));
    return s;
}

inline constexpr double kDefaultRevivalThreshold = 1e-10;

// Number of steps where the series grows by more than `eps`; 0 means the
// series is non-increasing at that resolution.
inline long blp_revival_count(const MeasureSeries& s, double eps = kDefaultRevivalThreshold) {
    long count = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] - s[i - 1] > eps) ++count;
    }
    return count;
}

// Largest single-step increase (negative when the series only decreases).
inline double max_revival(const MeasureSeries& s) {
    double best = -INFINITY;
    for (std::size_t i = 1; i < s.size(); ++i) best = std::max(best, s[i] - s[i - 1]);
    return best;
}

// Wootters concurrence. The lambda_i are the square roots of the (real,
// non-negative) eigenvalues of rho * rho_tilde, which equal the eigenvalues
// of sqrt(sqrt(rho) rho_tilde sqrt(rho)) for any valid rho.
inline double concurrence(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("concurrence needs a two-qubit state");
    const ComplexMatrix yy = kron(pauli::y(), pauli::y());
    const ComplexMatrix tilde = yy * rho.matrix().conjugate() * yy;
    const ComplexMatrix product = rho.matrix() * tilde;
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(product, false);
    if (solver.info() != Eigen::Success) {
        throw InvariantViolation("eigensolver failed in concurrence");
    }
    std::array<double, 4> lambda{};
    for (int i = 0; i < 4; ++i) lambda[i] = std::sqrt(std::max(solver.eigenvalues()(i).real(), 0.0));
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return std::clamp(lambda[0] - lambda[1] - lambda[2] - lambda[3], 0.0, 1.0);
}

// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), without the square.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dim(rho, sigma);
    const ComplexMatrix s = psd_sqrt(rho.matrix());
    const ComplexMatrix inner = s * sigma.matrix() * s;
    return std::clamp(psd_sqrt(0.5 * (inner + inner.adjoint())).trace().real(), 0.0, 1.0);
}

// Gibbs state of a system qubit's bare Hamiltonian omega * sigma_z.
inline DensityMatrix gibbs_state(double omega, double beta) {
    return DensityMatrix(detail::qubit_gibbs(omega, beta), SubsystemLayout::qubits({"s"}));
}

// Marginal of qubit s1 (k = 1) or s2 (k = 2) of a two-qubit state.
inline DensityMatrix qubit_marginal(const DensityMatrix& rho, int k) {
    if (k != 1 && k != 2) throw DomainError("qubit index must be 1 or 2");
    const DensityMatrix r(rho.matrix(), two_qubit_layout());
    const DensityMatrix m = r.reduced({k == 1 ? label::s1 : label::s2});
    return DensityMatrix(m.matrix(), SubsystemLayout::qubits({"s"}));
}

}  // namespace qcm
