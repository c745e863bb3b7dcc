// phase_space.hpp
// SU(2) phase-space tools for two spin-1/2 systems: Wigner 3j symbols,
// multipole operators T_KQ, spherical harmonics, the two-qubit Wigner
// function and its non-classical volume.
//
// Basis convention: m = +1/2 <-> |0>, matching sigma_z = diag(1, -1).
// Spherical harmonics carry the Condon-Shortley phase.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qcm/density_matrix.hpp"
#include "qcm/linalg.hpp"

namespace qcm {

// Integer or half-integer, stored as twice its value.
class HalfInteger {
public:
    constexpr HalfInteger() = default;

    static constexpr HalfInteger from_twice(int twice) {
        HalfInteger h;
        h.twice_ = twice;
        return h;
    }

    // Throws when `v` is not a multiple of 1/2.
    static HalfInteger from_double(double v) {
        const double t = 2.0 * v;
        if (!std::isfinite(t) || std::abs(t - std::round(t)) > 1e-12) {
            throw DomainError("value " + std::to_string(v) + " is not a half-integer");
        }
        return from_twice(static_cast<int>(std::lround(t)));
    }

    constexpr int twice() const noexcept { return twice_; }
    constexpr double value() const noexcept { return 0.5 * twice_; }

private:
    int twice_ = 0;
};

namespace detail {

inline double factorial(int n) {
    // Arguments are small and non-negative here.
    return std::tgamma(static_cast<double>(n) + 1.0);
}

}  // namespace detail

// Wigner 3j symbol by the Racah closed-form sum.
inline double wigner_3j(HalfInteger j1, HalfInteger j2, HalfInteger j3, HalfInteger m1, HalfInteger m2,
                        HalfInteger m3) {
    const std::array<std::pair<HalfInteger, HalfInteger>, 3> jm{{{j1, m1}, {j2, m2}, {j3, m3}}};
    for (const auto& [j, m] : jm) {
        if (j.twice() < 0) throw DomainError("angular momentum must be non-negative");
        if (std::abs(m.twice()) > j.twice()) throw DomainError("|m| exceeds j in 3j symbol");
        if ((j.twice() + m.twice()) % 2 != 0) throw DomainError("j and m differ by a non-integer");
    }
    if (m1.twice() + m2.twice() + m3.twice() != 0) return 0.0;
    const int a = j1.twice(), b = j2.twice(), c = j3.twice();
    if (c > a + b || c < std::abs(a - b) || (a + b + c) % 2 != 0) return 0.0;

    // Work with integers: every combination below is an even "twice" value.
    auto f = [](int twice) { return detail::factorial(twice / 2); };
    const double triangle = f(a + b - c) * f(a - b + c) * f(-a + b + c) / f(a + b + c + 2);
    const double norm = f(a + m1.twice()) * f(a - m1.twice()) * f(b + m2.twice()) * f(b - m2.twice()) *
                        f(c + m3.twice()) * f(c - m3.twice());

    const int k_min = std::max({0, (b - c - m1.twice()) / 2, (a - c + m2.twice()) / 2});
    const int k_max = std::min({(a + b - c) / 2, (a - m1.twice()) / 2, (b + m2.twice()) / 2});
    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        const double denom = detail::factorial(k) * f(c - b + 2 * k + m1.twice()) * f(c - a + 2 * k - m2.twice()) *
                             f(a + b - c - 2 * k) * f(a - 2 * k - m1.twice()) * f(b - 2 * k + m2.twice());
        sum += ((k % 2) ? -1.0 : 1.0) / denom;
    }
    const int phase_twice = a - b - m3.twice();  // j1 - j2 - m3, an integer
    const double phase = ((phase_twice / 2) % 2 == 0) ? 1.0 : -1.0;
    return phase * std::sqrt(triangle * norm) * sum;
}

inline double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3) {
    return wigner_3j(HalfInteger::from_double(j1), HalfInteger::from_double(j2), HalfInteger::from_double(j3),
                     HalfInteger::from_double(m1), HalfInteger::from_double(m2), HalfInteger::from_double(m3));
}

// Multipole label (K, Q) for spin 1/2: K in {0, 1}, |Q| <= K.
struct MultipoleIndex {
    int K = 0;
    int Q = 0;

    void validate() const {
        if (K < 0 || K > 1 || Q < -K || Q > K) {
            throw DomainError("multipole index (" + std::to_string(K) + ", " + std::to_string(Q) +
                              ") out of range for spin 1/2");
        }
    }
};

inline constexpr std::array<MultipoleIndex, 4> kSpinHalfMultipoles{{{0, 0}, {1, -1}, {1, 0}, {1, 1}}};

// T_KQ = sum_{m,m'} (-1)^{j-m} sqrt(2K+1) (j K j; -m Q m') |j,m><j,m'|, j = 1/2.
inline ComplexMatrix multipole_operator(int K, int Q) {
    MultipoleIndex{K, Q}.validate();
    const auto j = HalfInteger::from_twice(1);
    const std::array<int, 2> twice_m{1, -1};  // row/column 0 is m = +1/2
    ComplexMatrix t = ComplexMatrix::Zero(2, 2);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            const int j_minus_m = (j.twice() - twice_m[r]) / 2;
            const double sign = (j_minus_m % 2 == 0) ? 1.0 : -1.0;
            t(r, c) = sign * std::sqrt(2.0 * K + 1.0) *
                      wigner_3j(j, HalfInteger::from_twice(2 * K), j, HalfInteger::from_twice(-twice_m[r]),
                                HalfInteger::from_twice(2 * Q), HalfInteger::from_twice(twice_m[c]));
        }
    }
    return t;
}

// Y_KQ(theta, phi) for K <= 1.
inline Complex spherical_harmonic(int K, int Q, double theta, double phi) {
    MultipoleIndex{K, Q}.validate();
    using std::numbers::pi;
    if (K == 0) return 1.0 / std::sqrt(4.0 * pi);
    if (Q == 0) return std::sqrt(3.0 / (4.0 * pi)) * std::cos(theta);
    return -static_cast<double>(Q) * std::sqrt(3.0 / (8.0 * pi)) * std::sin(theta) * std::polar(1.0, Q * phi);
}

inline constexpr double kWignerImaginaryLimit = 1e-8;

// Two-qubit Wigner function. The 16 coefficients
// rho_{K1Q1K2Q2} = Tr[rho (T+_{K1Q1} (x) T+_{K2Q2})] are computed once.
class TwoQubitWigner {
public:
    explicit TwoQubitWigner(const DensityMatrix& rho) {
        if (rho.dim() != 4) throw DimensionError("two-qubit Wigner function needs a 4x4 state");
        std::array<ComplexMatrix, 4> t;
        for (std::size_t a = 0; a < 4; ++a) {
            t[a] = multipole_operator(kSpinHalfMultipoles[a].K, kSpinHalfMultipoles[a].Q).adjoint();
        }
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                coeff_[a][b] = (rho.matrix() * kron(t[a], t[b])).trace();
            }
        }
    }

    const std::array<std::array<Complex, 4>, 4>& coefficients() const noexcept { return coeff_; }

    // (2j + 1) / 4pi with j = 1/2.
    static constexpr double prefactor() { return 1.0 / (2.0 * std::numbers::pi); }

    static std::array<Complex, 4> harmonics(double theta, double phi) {
        std::array<Complex, 4> y;
        for (std::size_t a = 0; a < 4; ++a) {
            y[a] = spherical_harmonic(kSpinHalfMultipoles[a].K, kSpinHalfMultipoles[a].Q, theta, phi);
        }
        return y;
    }

    // Complex value before discarding the (roundoff) imaginary part.
    Complex evaluate(const std::array<Complex, 4>& y1, const std::array<Complex, 4>& y2) const {
        Complex sum = 0.0;
        for (std::size_t a = 0; a < 4; ++a) {
            Complex row = 0.0;
            for (std::size_t b = 0; b < 4; ++b) row += coeff_[a][b] * y2[b];
            sum += y1[a] * row;
        }
        return prefactor() * sum;
    }

    double operator()(double theta1, double phi1, double theta2, double phi2) const {
        return real_part(evaluate(harmonics(theta1, phi1), harmonics(theta2, phi2)));
    }

    static double real_part(Complex w) {
        if (std::abs(w.imag()) > kWignerImaginaryLimit) {
            throw InvariantViolation("Wigner function has imaginary part " + std::to_string(w.imag()));
        }
        return w.real();
    }

private:
    std::array<std::array<Complex, 4>, 4> coeff_{};
};

inline double wigner_two_qubit(const DensityMatrix& rho, double theta1, double phi1, double theta2, double phi2) {
    return TwoQubitWigner(rho)(theta1, phi1, theta2, phi2);
}

// Product rule on one sphere: Gauss-Legendre in cos(theta), trapezoid in phi.
struct QuadratureSpec {
    int n_theta = 32;
    int n_phi = 32;

    void validate() const {
        if (n_theta < 8) throw DomainError("quadrature needs n_theta >= 8");
        if (n_phi < 16) throw DomainError("quadrature needs n_phi >= 16");
    }

    QuadratureSpec doubled() const { return {2 * n_theta, 2 * n_phi}; }

    friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

struct SpherePoint {
    double theta;
    double phi;
    double weight;  // includes the sin(theta) Jacobian
};

inline std::vector<SpherePoint> sphere_grid(const QuadratureSpec& q) {
    q.validate();
    const auto [x, w] = gauss_legendre(q.n_theta);
    const double dphi = 2.0 * std::numbers::pi / q.n_phi;
    std::vector<SpherePoint> pts;
    pts.reserve(static_cast<std::size_t>(q.n_theta) * q.n_phi);
    for (int i = 0; i < q.n_theta; ++i) {
        for (int k = 0; k < q.n_phi; ++k) {
            pts.push_back({std::acos(x[i]), k * dphi, w[i] * dphi});
        }
    }
    return pts;
}

struct PhaseSpaceIntegrals {
    double signed_integral;    // integral of W, 1 for every state
    double absolute_integral;  // integral of |W|
    QuadratureSpec quadrature;

    double nonclassical_volume() const { return absolute_integral - 1.0; }
};

// Integrals of W and |W| over both spheres. Summation order is fixed by the
// grid index, so results are reproducible bit for bit.
inline PhaseSpaceIntegrals integrate_wigner(const DensityMatrix& rho, const QuadratureSpec& quad = {}) {
    const TwoQubitWigner w(rho);
    const auto grid = sphere_grid(quad);
    std::vector<std::array<Complex, 4>> y;
    y.reserve(grid.size());
    for (const auto& p : grid) y.push_back(TwoQubitWigner::harmonics(p.theta, p.phi));

    const auto& c = w.coefficients();
    double signed_total = 0.0, abs_total = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // First sphere contracted: W(i, k) = sum_b row[b] Y_b(k).
        std::array<Complex, 4> row{};
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) row[b] += TwoQubitWigner::prefactor() * y[i][a] * c[a][b];
        }
        double signed_row = 0.0, abs_row = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const Complex wk = row[0] * y[k][0] + row[1] * y[k][1] + row[2] * y[k][2] + row[3] * y[k][3];
            const double v = TwoQubitWigner::real_part(wk);
            signed_row += v * grid[k].weight;
            abs_row += std::abs(v) * grid[k].weight;
        }
        signed_total += signed_row * grid[i].weight;
        abs_total += abs_row * grid[i].weight;
    }
    return {signed_total, abs_total, quad};
}

struct NonclassicalVolume {
    double value;
    QuadratureSpec quadrature;
};

inline NonclassicalVolume nonclassical_volume(const DensityMatrix& rho, const QuadratureSpec& quad = {}) {
    const auto r = integrate_wigner(rho, quad);
    return {r.nonclassical_volume(), quad};
}

}  // namespace qcm
