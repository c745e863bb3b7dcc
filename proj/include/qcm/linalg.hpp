// linalg.hpp
// Dense complex matrices, tensor-product bookkeeping and the spectral
// routines (eigendecomposition, exponential, square root, trace norm).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qcm/error.hpp"

namespace qcm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// All numerical thresholds live here so that call sites never hard-code one.
struct Tolerances {
    double hermitian = 1e-10;  // max-norm of m - m^dagger accepted as Hermitian
    double psd_floor = 1e-9;   // eigenvalues in [-psd_floor, 0) are roundoff
    double trace = 1e-10;      // |tr(rho) - 1| for a density matrix
    double unitary = 1e-12;    // max-norm of U U^dagger - I
};

inline constexpr Tolerances kDefaultTolerances{};

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs(a - b) <= tol;
}

inline double hermiticity_residual(const ComplexMatrix& m) {
    return max_abs(m - m.adjoint());
}

inline double unitarity_residual(const ComplexMatrix& u) {
    return max_abs(u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols()));
}

inline ComplexMatrix identity(Eigen::Index n) {
    return ComplexMatrix::Identity(n, n);
}

namespace pauli {

inline ComplexMatrix x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline ComplexMatrix y() {
    ComplexMatrix m(2, 2);
    m << 0.0, -kI, kI, 0.0;
    return m;
}

// diag(1, -1): |0> is the +1 eigenstate.
inline ComplexMatrix z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

}  // namespace pauli

// Ordered tensor factors with unique labels. The first factor is the most
// significant digit of a composite basis index, matching kron(a, b).
class SubsystemLayout {
public:
    SubsystemLayout() = default;

    SubsystemLayout(std::vector<std::size_t> dims, std::vector<std::string> labels)
        : dims_(std::move(dims)), labels_(std::move(labels)) {
        if (dims_.size() != labels_.size()) {
            throw DimensionError("layout needs one label per subsystem");
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (dims_[i] == 0) {
                throw DimensionError("subsystem '" + labels_[i] + "' has dimension 0");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (labels_[i] == labels_[j]) {
                    throw DomainError("duplicate subsystem label '" + labels_[i] + "'");
                }
            }
        }
    }

    // Every factor a qubit.
    static SubsystemLayout qubits(std::vector<std::string> labels) {
        std::vector<std::size_t> dims(labels.size(), 2);
        return SubsystemLayout(std::move(dims), std::move(labels));
    }

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    std::size_t dim() const noexcept {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
    }

    std::optional<std::size_t> find(std::string_view label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] == label) return i;
        }
        return std::nullopt;
    }

    bool contains(std::string_view label) const { return find(label).has_value(); }

    std::size_t index_of(std::string_view label) const {
        if (auto i = find(label)) return *i;
        throw DomainError("unknown subsystem label '" + std::string(label) + "'");
    }

    // Layout restricted to `keep`, in this layout's order.
    SubsystemLayout subset(const std::vector<std::string>& keep) const {
        std::vector<std::size_t> dims;
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (std::find(keep.begin(), keep.end(), labels_[i]) != keep.end()) {
                dims.push_back(dims_[i]);
                labels.push_back(labels_[i]);
            }
        }
        return SubsystemLayout(std::move(dims), std::move(labels));
    }

    SubsystemLayout concat(const SubsystemLayout& other) const {
        auto dims = dims_;
        auto labels = labels_;
        dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
        labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
        return SubsystemLayout(std::move(dims), std::move(labels));
    }

    SubsystemLayout renamed(std::string_view from, std::string to) const {
        auto labels = labels_;
        labels[index_of(from)] = std::move(to);
        return SubsystemLayout(dims_, std::move(labels));
    }

    std::string describe() const {
        std::string out = "(";
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (i) out += ", ";
            out += labels_[i] + ":" + std::to_string(dims_[i]);
        }
        return out + ")";
    }

    friend bool operator==(const SubsystemLayout&, const SubsystemLayout&) = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::string> labels_;
};

namespace detail {

inline std::vector<std::size_t> strides(const SubsystemLayout& layout) {
    std::vector<std::size_t> s(layout.size(), 1);
    for (std::size_t i = layout.size(); i-- > 1;) {
        s[i - 1] = s[i] * layout.dims()[i];
    }
    return s;
}

// Composite-index contribution of every joint configuration of `positions`
// (first position most significant). Offsets of disjoint position sets add.
inline std::vector<std::size_t> offsets(const SubsystemLayout& layout,
                                        const std::vector<std::size_t>& positions) {
    const auto stride = strides(layout);
    std::vector<std::size_t> out{0};
    for (std::size_t p : positions) {
        std::vector<std::size_t> next;
        next.reserve(out.size() * layout.dims()[p]);
        for (std::size_t base : out) {
            for (std::size_t d = 0; d < layout.dims()[p]; ++d) {
                next.push_back(base + d * stride[p]);
            }
        }
        out = std::move(next);
    }
    return out;
}

inline std::vector<std::size_t> positions_of(const SubsystemLayout& layout,
                                             const std::vector<std::string>& labels) {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        const auto p = layout.index_of(l);
        if (std::find(out.begin(), out.end(), p) != out.end()) {
            throw DomainError("subsystem label '" + l + "' listed twice");
        }
        out.push_back(p);
    }
    return out;
}

inline std::vector<std::size_t> complement(const SubsystemLayout& layout,
                                           const std::vector<std::size_t>& positions) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (std::find(positions.begin(), positions.end(), i) == positions.end()) out.push_back(i);
    }
    return out;
}

inline void require_square_layout(const ComplexMatrix& m, const SubsystemLayout& layout) {
    if (m.rows() != m.cols()) {
        throw DimensionError("expected a square matrix, got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
    if (static_cast<std::size_t>(m.rows()) != layout.dim()) {
        throw DimensionError("matrix dimension " + std::to_string(m.rows()) +
                             " does not match layout " + layout.describe());
    }
}

}  // namespace detail

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors) {
    ComplexMatrix out = ComplexMatrix::Ones(1, 1);
    for (const auto& f : factors) out = kron(out, f);
    return out;
}

// Reduced operator on `keep`, ordered as in `layout`. Preserves the trace.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemLayout& layout,
                                   const std::vector<std::string>& keep) {
    detail::require_square_layout(m, layout);
    if (keep.empty()) {
        throw DomainError("partial_trace needs at least one subsystem to keep");
    }
    auto kept = detail::positions_of(layout, keep);
    std::sort(kept.begin(), kept.end());
    const auto traced = detail::complement(layout, kept);
    const auto ko = detail::offsets(layout, kept);
    const auto to = detail::offsets(layout, traced);

    const auto n = static_cast<Eigen::Index>(ko.size());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            Complex acc = 0.0;
            for (std::size_t r : to) {
                acc += m(static_cast<Eigen::Index>(ko[i] + r), static_cast<Eigen::Index>(ko[j] + r));
            }
            out(i, j) = acc;
        }
    }
    return out;
}

// Same operator with its tensor factors listed in `order` (a permutation of
// the layout's labels).
inline ComplexMatrix reorder(const ComplexMatrix& m, const SubsystemLayout& layout,
                             const std::vector<std::string>& order) {
    detail::require_square_layout(m, layout);
    if (order.size() != layout.size()) {
        throw DomainError("reorder needs every subsystem label exactly once");
    }
    const auto pos = detail::positions_of(layout, order);
    // Enumerating the old layout's offsets in the new factor order visits the
    // old composite indices in new composite-index order.
    const auto old_index = detail::offsets(layout, pos);
    const auto n = static_cast<Eigen::Index>(old_index.size());
    ComplexMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = m(static_cast<Eigen::Index>(old_index[i]), static_cast<Eigen::Index>(old_index[j]));
        }
    }
    return out;
}

// Lifts `op`, acting on `targets` (first target most significant), to the
// full space of `layout` with identity on every other factor.
inline ComplexMatrix embed(const ComplexMatrix& op, const SubsystemLayout& layout,
                           const std::vector<std::string>& targets) {
    const auto pos = detail::positions_of(layout, targets);
    const auto to = detail::offsets(layout, pos);
    const auto ro = detail::offsets(layout, detail::complement(layout, pos));
    if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != to.size()) {
        throw DimensionError("operator dimension " + std::to_string(op.rows()) +
                             " does not match its target subsystems");
    }
    const auto n = static_cast<Eigen::Index>(layout.dim());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (std::size_t r : ro) {
        for (std::size_t a = 0; a < to.size(); ++a) {
            for (std::size_t b = 0; b < to.size(); ++b) {
                out(static_cast<Eigen::Index>(to[a] + r), static_cast<Eigen::Index>(to[b] + r)) =
                    op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
        }
    }
    return out;
}

struct HermitianEigen {
    RealVector values;     // ascending
    ComplexMatrix vectors; // orthonormal columns
};

inline HermitianEigen hermitian_eig(const ComplexMatrix& m, const Tolerances& tol = kDefaultTolerances) {
    if (m.rows() != m.cols()) {
        throw DimensionError("hermitian_eig needs a square matrix");
    }
    const double residual = hermiticity_residual(m);
    if (residual > tol.hermitian) {
        throw DomainError("matrix is not Hermitian (residual " + std::to_string(residual) + ")");
    }
    // Symmetrize so the solver sees exactly the Hermitian part.
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw InvariantViolation("Hermitian eigensolver failed to converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// Applies f to the spectrum of a Hermitian matrix: V f(diag) V^dagger.
template <typename F>
ComplexMatrix hermitian_function(const HermitianEigen& eig, F&& f) {
    ComplexVector d(eig.values.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(eig.values(i));
    return eig.vectors * d.asDiagonal() * eig.vectors.adjoint();
}

// exp(-i h t) through the spectral decomposition of h.
inline ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double t,
                                              const Tolerances& tol = kDefaultTolerances) {
    return hermitian_function(hermitian_eig(h, tol),
                              [t](double lambda) { return std::exp(-kI * lambda * t); });
}

inline ComplexMatrix psd_sqrt(const ComplexMatrix& m, const Tolerances& tol = kDefaultTolerances) {
    const auto eig = hermitian_eig(m, tol);
    if (eig.values.size() > 0 && eig.values.minCoeff() < -tol.psd_floor) {
        throw InvariantViolation("matrix is not positive semidefinite (eigenvalue " +
                                 std::to_string(eig.values.minCoeff()) + ")");
    }
    return hermitian_function(eig, [](double lambda) { return Complex(std::sqrt(std::max(lambda, 0.0))); });
}

// Sum of singular values.
inline double trace_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().sum();
}

}  // namespace qcm
