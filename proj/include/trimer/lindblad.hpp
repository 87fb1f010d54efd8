#pragma once

// Steady state of the local master equation for the three-mode loop:
// each site couples to its own thermal reservoir, and the second moments
// close on a Lyapunov equation for C_lm = <a_l^dag a_m>.

#include <Eigen/Dense>
#include <array>

#include "trimer/gaussian.hpp"
#include "trimer/model.hpp"

namespace trimer {

struct DriftDiffusion {
    Eigen::Matrix3cd A;  // dC/dt = A C + C A^dag + Q
    Eigen::Matrix3cd Q;
};

// Drift / diffusion matrices. By default the common frequency omega is
// rotated away (currents and occupations are frame-invariant); pass
// rotating_frame = false for the lab-frame generator.
DriftDiffusion drift_and_diffusion(const TrimerParams& p,
                                   const LinkPhaseAssignment& gauge,
                                   bool rotating_frame = true);

struct SteadyStateReport {
    Eigen::Matrix3cd C;                    // steady correlations
    std::array<double, 3> occupations{};   // n_1, n_2, n_3
    double current_21 = 0.0;               // particle currents, flow 2->1 etc.
    double current_23 = 0.0;
    double current_13 = 0.0;
    std::array<double, 3> heat_currents{}; // bath -> site energy flow, J^Q_l
    std::array<double, 3> T_eff{};         // per-site effective temperatures
    double entropy_production = 0.0;       // -sum_l J^Q_l / T_eff_l
    double entropy_production_bath = 0.0;  // same with bath temperatures
    double second_law_slack = 0.0;         // sum_l J^Q_l (zero in steady state)
};

SteadyStateReport steady_state(const TrimerParams& p, const LinkPhaseAssignment& gauge);

// Effective temperature of each reduced single-site state.
std::array<double, 3> effective_temperatures(const Eigen::Matrix3cd& C,
                                             const TrimerParams& p);

// Entropy production rate from heat currents and site temperatures.
double entropy_production(const std::array<double, 3>& heat_currents,
                          const std::array<double, 3>& temperatures);

}  // namespace trimer
