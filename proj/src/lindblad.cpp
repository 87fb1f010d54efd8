#include "trimer/lindblad.hpp"

#include <cmath>

namespace trimer {

namespace {
constexpr Complex kI{0.0, 1.0};
}

DriftDiffusion drift_and_diffusion(const TrimerParams& p,
                                   const LinkPhaseAssignment& gauge,
                                   bool rotating_frame) {
    const Eigen::Matrix3cd h =
        build_single_particle_hamiltonian(p, gauge, !rotating_frame);
    Eigen::Matrix3cd G = Eigen::Matrix3cd::Zero();
    G.diagonal() << p.gamma1(), p.gamma2(), p.gamma3();
    DriftDiffusion dd;
    dd.A = kI * h.transpose() - 0.5 * G;
    dd.Q = Eigen::Matrix3cd::Zero();
    dd.Q.diagonal() << p.gamma1() * p.n_cold(), p.gamma2() * p.n_hot(),
        p.gamma3() * p.n_cold();
    return dd;
}

std::array<double, 3> effective_temperatures(const Eigen::Matrix3cd& C,
                                             const TrimerParams& p) {
    const double hi = 4.0 * std::max(p.T_hot, p.T_cold);
    std::array<double, 3> out{};
    for (int l = 0; l < 3; ++l) {
        const double n = C(l, l).real();
        Eigen::Matrix2d V = (n + 0.5) * Eigen::Matrix2d::Identity();
        out[static_cast<size_t>(l)] =
            effective_temperature(GaussianState(V), p.omega, hi).T;
    }
    return out;
}

double entropy_production(const std::array<double, 3>& heat_currents,
                          const std::array<double, 3>& temperatures) {
    double s = 0.0;
    for (size_t l = 0; l < 3; ++l) {
        if (temperatures[l] <= 0.0)
            throw std::invalid_argument("entropy_production requires positive temperatures");
        s -= heat_currents[l] / temperatures[l];
    }
    return s;
}

SteadyStateReport steady_state(const TrimerParams& p, const LinkPhaseAssignment& gauge) {
    const DriftDiffusion dd = drift_and_diffusion(p, gauge);
    SteadyStateReport r;
    r.C = solve_lyapunov(dd.A, dd.Q);

    for (int l = 0; l < 3; ++l) r.occupations[static_cast<size_t>(l)] = r.C(l, l).real();
    r.current_21 = current_expectation(r.C, Link::L21, p, gauge);
    r.current_23 = current_expectation(r.C, Link::L23, p, gauge);
    r.current_13 = current_expectation(r.C, Link::L13, p, gauge);

    const std::array<double, 3> rates{p.gamma1(), p.gamma2(), p.gamma3()};
    const std::array<double, 3> bath_n{p.n_cold(), p.n_hot(), p.n_cold()};
    const std::array<double, 3> bath_T{p.T_cold, p.T_hot, p.T_cold};
    for (size_t l = 0; l < 3; ++l) {
        r.heat_currents[l] = rates[l] * p.omega * (bath_n[l] - r.occupations[l]);
        r.second_law_slack += r.heat_currents[l];
    }
    r.T_eff = effective_temperatures(r.C, p);
    r.entropy_production = entropy_production(r.heat_currents, r.T_eff);
    r.entropy_production_bath = entropy_production(r.heat_currents, bath_T);
    return r;
}

}  // namespace trimer
