#pragma once

// Brute-force reference solver: integrates the full density matrix of the
// three-mode master equation in a truncated Fock basis. Exists to validate
// the covariance-level steady state, not for production runs.

#include <Eigen/Dense>
#include <array>

#include "trimer/model.hpp"

namespace trimer {

struct FockConfig {
    std::array<int, 3> cutoffs{0, 0, 0};  // per-site max occupation; 0 = auto
    double tail_tol = 1e-9;               // thermal tail mass for auto cutoffs
    int dim_cap = 4096;                   // hard cap on the Hilbert dimension
    double rtol = 1e-9;                   // integrator relative tolerance
    double atol = 1e-13;
    double horizon = 0.0;                 // max integration time; 0 = 400/gamma
    double convergence_tol = 1e-10;       // stop when ||d rho/dt||_F drops below
};

struct FockSteadyState {
    Eigen::Matrix3cd C;                    // <a_l^dag a_m>
    std::array<double, 3> occupations{};
    std::array<double, 3> heat_currents{}; // Tr{H_l D_l rho}
    Eigen::MatrixXcd rho;                  // final density matrix
    std::array<int, 3> cutoffs{};
    double residual_norm = 0.0;            // ||d rho/dt||_F at exit
    double tail_mass = 0.0;                // population of the top Fock layer
    double trace_error = 0.0;              // |Tr rho - 1|
    double t_final = 0.0;
    long steps = 0;
};

// Integrate from the product thermal state at bath temperatures until the
// steady state is reached. Throws if the Fock cap is exceeded or the
// integration does not converge before the horizon.
FockSteadyState integrate_to_steady(const TrimerParams& p,
                                    const LinkPhaseAssignment& gauge,
                                    const FockConfig& cfg = {});

}  // namespace trimer
