#pragma once

// Gaussian-state toolbox for bosonic modes: second-moment containers,
// Lyapunov steady states, unitary propagators, two-mode fidelity and
// effective-temperature extraction.
//
// Conventions (fixed for the whole library):
//   x = (a + a^dag)/2,  p = (a - a^dag)/(2i),  [x, p] = i/2
//   quadrature vector u = (x_1..x_n, p_1..p_n)
//   covariance V_ij = <{u_i, u_j}> / 1  with  V_vacuum = I/2
//   symplectic form T = Omega/2, Omega = [[0, I], [-I, 0]]

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace trimer {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;

struct QuadratureConvention {
    static constexpr double vacuum_variance = 0.25;   // <x^2> in vacuum
    static constexpr double vacuum_diag = 0.5;        // V diagonal in vacuum
    static constexpr double commutator_scale = 0.5;   // [x,p] = i * this
};

// Normal-ordered correlations C_lm = <a_l^dag a_m>.
struct CorrelationMatrix {
    MatrixXcd m;

    explicit CorrelationMatrix(MatrixXcd mat) : m(std::move(mat)) {}
    int modes() const { return static_cast<int>(m.rows()); }

    // Hermiticity / positivity / real-diagonal checks, throws on violation.
    void validate(double tol = 1e-9) const;
};

// Real covariance matrix in (x_1..x_n, p_1..p_n) ordering.
struct GaussianState {
    MatrixXd V;

    explicit GaussianState(MatrixXd cov) : V(std::move(cov)) {}
    int modes() const { return static_cast<int>(V.rows()) / 2; }

    // Symmetry and Heisenberg uncertainty (V + i*Omega/2 >= 0), throws.
    void validate(double tol = 1e-9) const;
};

// Symplectic form Omega for n modes, [[0, I], [-I, 0]].
MatrixXd symplectic_form(int n);

// Bose-Einstein occupation 1/(exp(omega/T) - 1); omega, T > 0.
double bose_occupation(double omega, double T);

// n-mode product thermal state at temperature T (same frequency omega).
GaussianState thermal_state(int n, double omega, double T);

// Convert <a^dag a> correlations (zero anomalous moments) to a covariance.
GaussianState correlations_to_gaussian(const CorrelationMatrix& C);

// Inverse conversion; also recovers anomalous moments M_lm = <a_l a_m>.
struct CorrelationDecomposition {
    MatrixXcd normal;     // <a_l^dag a_m>
    MatrixXcd anomalous;  // <a_l a_m>
};
CorrelationDecomposition gaussian_to_correlations(const GaussianState& G);

// Solve A X + X A^dag + Q = 0 for the unique steady state X.
// Throws std::runtime_error if A is not Hurwitz (no stable steady state).
MatrixXcd solve_lyapunov(const MatrixXcd& A, const MatrixXcd& Q);

// exp(-i W t) for Hermitian W via eigendecomposition.
// Throws std::invalid_argument if W is not Hermitian within tolerance.
MatrixXcd propagator(const MatrixXcd& W, double t, double herm_tol = 1e-10);

// Uhlmann fidelity between two-mode Gaussian states with zero means.
double fidelity_two_mode(const GaussianState& a, const GaussianState& b);

struct EffectiveTemperature {
    double T = 0.0;                  // best-matching thermal temperature
    double trace_distance = 0.0;     // residual distance at the minimum
    double anomalous_magnitude = 0.0;
    bool at_lower_bound = false;     // state indistinguishable from vacuum
};

// Temperature of the thermal state closest (in trace distance of the
// number distribution) to a single-mode Gaussian state. Bracket defaults
// to [0.01*omega, 4*T_hat] where T_hat is the occupation-matched guess;
// pass bracket_hi > 0 to override the upper end.
EffectiveTemperature effective_temperature(const GaussianState& single_mode,
                                           double omega,
                                           double bracket_hi = 0.0);

// Thermal number distribution truncated so the neglected tail mass is
// below `tail_tol`; used by the effective-temperature search and tests.
std::vector<double> thermal_number_distribution(double nbar, int cutoff);
int thermal_cutoff(double nbar, double tail_tol, int cap = 4096);

// Number distribution of a general (possibly squeezed) single-mode
// Gaussian state, computed in a truncated Fock basis.
std::vector<double> number_distribution(const GaussianState& single_mode,
                                        int cutoff);

}  // namespace trimer
