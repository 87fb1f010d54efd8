#pragma once

// Three-mode loop with a synthetic flux: single-particle Hamiltonian,
// link currents, and the hybrid (bright/dark) mode picture.
//
// Sites are ordered (1, 2, 3); site 2 couples to the hot bath, sites 1
// and 3 to the cold bath. The loop phase theta lives on the 3->1 link in
// the default gauge, i.e. h_31 = J e^{i theta} and h_13 = J e^{-i theta}.

#include <Eigen/Dense>
#include <complex>

#include "trimer/gaussian.hpp"

namespace trimer {

struct TrimerParams {
    double omega = 1.0;    // common mode frequency
    double J = 0.003;      // hopping amplitude
    double theta = 0.0;    // loop phase
    double gamma = 0.03;   // bath coupling rate
    double T_hot = 5.0;    // hot bath temperature (site 2)
    double T_cold = 3.0;   // cold bath temperature (sites 1, 3)
    double delta = 0.0;    // hopping imbalance: J21 = J(1+delta), J23 = J(1-delta)
    double eps = 0.0;      // damping imbalance: g1 = gamma(1+eps), g3 = gamma(1-eps)

    void validate() const;

    double j21() const { return J * (1.0 + delta); }
    double j23() const { return J * (1.0 - delta); }
    double j13() const { return J; }
    double gamma1() const { return gamma * (1.0 + eps); }
    double gamma2() const { return gamma; }
    double gamma3() const { return gamma * (1.0 - eps); }
    double n_hot() const { return bose_occupation(omega, T_hot); }
    double n_cold() const { return bose_occupation(omega, T_cold); }
};

// Distribution of the loop phase over the three links (1->2, 2->3, 3->1).
// Physical results depend only on the gauge-invariant sum.
struct LinkPhaseAssignment {
    double theta12 = 0.0;
    double theta23 = 0.0;
    double theta31 = 0.0;

    static LinkPhaseAssignment default_gauge(double theta) { return {0.0, 0.0, theta}; }
    double loop_sum() const { return theta12 + theta23 + theta31; }
};

enum class Link { L21, L23, L13 };

// 3x3 single-particle matrix h with H = a^dag h a.
// Throws if the gauge does not sum to params.theta (mod 2*pi).
Eigen::Matrix3cd build_single_particle_hamiltonian(const TrimerParams& p,
                                                   const LinkPhaseAssignment& gauge,
                                                   bool include_omega = true);

// Particle current on a link from the correlation matrix; positive values
// mean flow from the first index to the second (2->1, 2->3, 1->3).
double current_expectation(const Eigen::Matrix3cd& C, Link link,
                           const TrimerParams& p, const LinkPhaseAssignment& gauge);

// Hybrid-mode description A_pm built from sites 1 and 3 (requires delta = 0):
// frequencies omega +- J and couplings J_pm = J (1 pm e^{pm i theta}) / sqrt(2).
struct HybridModeData {
    double omega_plus = 0.0;
    double omega_minus = 0.0;
    Complex j_plus{0.0, 0.0};
    Complex j_minus{0.0, 0.0};
    Eigen::Matrix3cd transform;  // rows: (a2, A_plus, A_minus) in site basis
};
HybridModeData hybrid_mode_data(const TrimerParams& p, const LinkPhaseAssignment& gauge);

// Correlations in the hybrid basis: C_hyb = conj(S) C S^T.
Eigen::Matrix3cd to_hybrid_basis(const Eigen::Matrix3cd& C, const HybridModeData& hyb);

// 1->3 current evaluated from hybrid-basis correlations; must agree with
// current_expectation(C, Link::L13, ...) in the site basis.
double current_13_hybrid(const Eigen::Matrix3cd& C_hyb, const TrimerParams& p,
                         const LinkPhaseAssignment& gauge);

// Weak-coupling closed-form estimate 2 J (N_H - N_C) (J/gamma)^2 sin(theta)
// for the 1->3 current, as quoted in the literature. Known to underestimate
// the simulated steady-state amplitude by roughly a factor of two.
double approx_current_13(const TrimerParams& p);

}  // namespace trimer
