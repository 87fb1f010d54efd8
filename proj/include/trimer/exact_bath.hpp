#pragma once

// Exact unitary dynamics of the three-mode loop coupled to discretized
// thermal reservoirs: one hot bath on site 2, one shared cold bath coupled
// to sites 1 and 3. Everything is Gaussian, so the full problem reduces to
// one Hermitian eigendecomposition of the composite coupling matrix.

#include <Eigen/Dense>

#include "trimer/gaussian.hpp"
#include "trimer/model.hpp"

namespace trimer {

struct BathDiscretization {
    Eigen::VectorXd omegas;     // omega_j = (j/N) * omega_c, j = 1..N
    Eigen::VectorXd couplings;  // g_j = sqrt(j gamma / (2 pi omega)) * omega_c / N
};

// Linear discretization of an Ohmic-like bath with flat response gamma at
// the system frequency and hard cutoff omega_c.
BathDiscretization discretize_bath(int N, double omega_c, double gamma, double omega);

struct CompositeModel {
    int N = 0;                      // modes per bath
    double omega_c = 0.0;
    Eigen::MatrixXcd W;             // (2N+3) x (2N+3) single-particle matrix
    Eigen::VectorXd occupations;    // initial thermal occupation per mode
    // Mode layout: [a2, hot 1..N, a1, a3, cold 1..N].
    int idx_site(int site) const {  // site = 1, 2, 3
        if (site == 1) return N + 1;
        if (site == 2) return 0;
        if (site == 3) return N + 2;
        throw std::invalid_argument("site must be 1, 2 or 3");
    }
    int modes() const { return 2 * N + 3; }
};

// Assemble the composite matrix and the product-thermal initial occupations.
// The eps imbalance scales the two cold coupling rows by sqrt(1 +- eps).
CompositeModel build_composite(const TrimerParams& p, const LinkPhaseAssignment& gauge,
                               int N, double omega_c);

// Diagonal product-thermal covariance of the full composite.
GaussianState initial_covariance(const CompositeModel& model);

// Evolve a covariance matrix for time t under the composite Hamiltonian.
GaussianState propagate(const CompositeModel& model, const GaussianState& cov, double t);

// Reduced system correlations (sites 1, 2, 3) from a full covariance.
CorrelationDecomposition extract_system_correlations(const CompositeModel& model,
                                                     const GaussianState& cov);

struct ExactOptions {
    int N = 400;
    double omega_c = 0.0;  // 0 = 3 * omega
    double t_ss = 0.0;     // 0 = 6 / gamma
    bool ignore_recurrence_guard = false;
};

struct ExactCurrents {
    double current_21 = 0.0;
    double current_23 = 0.0;
    double current_13 = 0.0;
    Eigen::Matrix3cd C;         // system correlations at t_ss
    double drift = 0.0;         // relative current change over the last 1/gamma
    double t_ss = 0.0;
    double t_recurrence = 0.0;  // 2 pi N / omega_c
};

// Quasi-steady currents at t_ss, using the fast path that only builds the
// three system rows of the propagator. Throws if t_ss runs into the bath
// recurrence time (unless overridden).
ExactCurrents quasi_steady_currents(const TrimerParams& p, const LinkPhaseAssignment& gauge,
                                    const ExactOptions& opts = {});

}  // namespace trimer
