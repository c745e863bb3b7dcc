#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qcm/linalg.hpp"

namespace qcm {

// How far a matrix sits from being a density matrix.
struct DensityDiagnostics {
    double trace_error = 0.0;     // |tr(m) - 1|
    double hermiticity = 0.0;     // max-norm of m - m^dagger
    double min_eigenvalue = 0.0;  // of the Hermitian part

    bool ok(const Tolerances& tol) const {
        return trace_error <= tol.trace && hermiticity <= tol.hermitian && min_eigenvalue >= -tol.psd_floor;
    }

    std::string describe() const {
        return "trace error " + std::to_string(trace_error) + ", hermiticity residual " +
               std::to_string(hermiticity) + ", min eigenvalue " + std::to_string(min_eigenvalue);
    }
};

inline DensityDiagnostics diagnose_density(const ComplexMatrix& m) {
    DensityDiagnostics d;
    d.trace_error = std::abs(m.trace() - Complex(1.0));
    d.hermiticity = hermiticity_residual(m);
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
    return d;
}

// Trace-one, Hermitian, positive semidefinite operator together with the
// tensor layout of the subsystems it describes. Immutable once built.
class DensityMatrix {
public:
    DensityMatrix(ComplexMatrix m, SubsystemLayout layout, const Tolerances& tol = kDefaultTolerances)
        : matrix_(std::move(m)), layout_(std::move(layout)) {
        detail::require_square_layout(matrix_, layout_);
        const auto d = diagnose_density(matrix_);
        if (!d.ok(tol)) {
            throw InvariantViolation("not a valid density matrix: " + d.describe());
        }
    }

    // |psi><psi| of the normalized vector.
    static DensityMatrix pure(const ComplexVector& psi, SubsystemLayout layout) {
        const double norm = psi.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw DomainError("state vector has zero or non-finite norm");
        }
        const ComplexVector v = psi / norm;
        return DensityMatrix(v * v.adjoint(), std::move(layout));
    }

    static DensityMatrix maximally_mixed(SubsystemLayout layout) {
        const auto n = static_cast<Eigen::Index>(layout.dim());
        return DensityMatrix(identity(n) / static_cast<double>(n), std::move(layout));
    }

    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    const SubsystemLayout& layout() const noexcept { return layout_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

    DensityMatrix reduced(const std::vector<std::string>& keep) const {
        // A partial trace of a valid state is valid up to roundoff; the
        // constructor re-checks it.
        return DensityMatrix(partial_trace(matrix_, layout_, keep), layout_.subset(keep));
    }

    DensityMatrix tensor(const DensityMatrix& other) const {
        return DensityMatrix(kron(matrix_, other.matrix_), layout_.concat(other.layout_));
    }

private:
    ComplexMatrix matrix_;
    SubsystemLayout layout_;
};

inline SubsystemLayout two_qubit_layout() {
    return SubsystemLayout::qubits({"s1", "s2"});
}

}  // namespace qcm
