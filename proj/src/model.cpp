#include "trimer/model.hpp"

#include <cmath>
#include <numbers>

namespace trimer {

namespace {
constexpr Complex kI{0.0, 1.0};

double wrap_angle(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    x = std::fmod(x, two_pi);
    if (x > std::numbers::pi) x -= two_pi;
    if (x < -std::numbers::pi) x += two_pi;
    return x;
}

// Phase entering the current operator on link (l, m): the conjugate of the
// hopping phase h_lm carries.
double link_phase(Link link, const LinkPhaseAssignment& g) {
    switch (link) {
        case Link::L21: return -g.theta12;
        case Link::L23: return g.theta23;
        case Link::L13: return -g.theta31;
    }
    throw std::logic_error("unreachable");
}

double link_amplitude(Link link, const TrimerParams& p) {
    switch (link) {
        case Link::L21: return p.j21();
        case Link::L23: return p.j23();
        case Link::L13: return p.j13();
    }
    throw std::logic_error("unreachable");
}

}  // namespace

void TrimerParams::validate() const {
    if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
    if (J < 0.0) throw std::invalid_argument("J must be non-negative");
    if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
    if (T_hot <= 0.0 || T_cold <= 0.0)
        throw std::invalid_argument("bath temperatures must be positive");
    if (std::abs(delta) >= 1.0)
        throw std::invalid_argument("|delta| must be below 1");
    if (std::abs(eps) >= 1.0)
        throw std::invalid_argument("|eps| must be below 1");
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
}

Eigen::Matrix3cd build_single_particle_hamiltonian(const TrimerParams& p,
                                                   const LinkPhaseAssignment& gauge,
                                                   bool include_omega) {
    p.validate();
    if (std::abs(wrap_angle(gauge.loop_sum() - p.theta)) > 1e-9)
        throw std::invalid_argument("gauge phases do not sum to the loop phase");
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    if (include_omega) h.diagonal().setConstant(p.omega);
    h(0, 1) = p.j21() * std::exp(kI * gauge.theta12);
    h(1, 2) = p.j23() * std::exp(kI * gauge.theta23);
    h(2, 0) = p.j13() * std::exp(kI * gauge.theta31);
    h(1, 0) = std::conj(h(0, 1));
    h(2, 1) = std::conj(h(1, 2));
    h(0, 2) = std::conj(h(2, 0));
    return h;
}

double current_expectation(const Eigen::Matrix3cd& C, Link link,
                           const TrimerParams& p, const LinkPhaseAssignment& gauge) {
    int l = 0, m = 0;
    switch (link) {
        case Link::L21: l = 1; m = 0; break;
        case Link::L23: l = 1; m = 2; break;
        case Link::L13: l = 0; m = 2; break;
    }
    const Complex phase = std::exp(kI * link_phase(link, gauge));
    const double amp = link_amplitude(link, p);
    return (kI * amp * (phase * C(l, m) - std::conj(phase) * C(m, l))).real();
}

HybridModeData hybrid_mode_data(const TrimerParams& p, const LinkPhaseAssignment& gauge) {
    p.validate();
    if (p.delta != 0.0)
        throw std::invalid_argument("hybrid modes require balanced hopping (delta = 0)");
    if (gauge.theta12 != 0.0 || gauge.theta23 != 0.0)
        throw std::invalid_argument("hybrid modes are defined in the all-phase-on-3-1 gauge");
    // Phase carried by h_13 in this gauge.
    const double phi = -gauge.theta31;
    HybridModeData out;
    out.omega_plus = p.omega + p.J;
    out.omega_minus = p.omega - p.J;
    const double theta = gauge.loop_sum();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    out.j_plus = p.J * (1.0 + std::exp(kI * theta)) * inv_sqrt2;
    out.j_minus = p.J * (1.0 - std::exp(-kI * theta)) * inv_sqrt2;
    out.transform.setZero();
    out.transform(0, 1) = 1.0;  // a2 passes through
    out.transform(1, 0) = inv_sqrt2;
    out.transform(1, 2) = std::exp(kI * phi) * inv_sqrt2;
    out.transform(2, 0) = -std::exp(-kI * phi) * inv_sqrt2;
    out.transform(2, 2) = inv_sqrt2;
    return out;
}

Eigen::Matrix3cd to_hybrid_basis(const Eigen::Matrix3cd& C, const HybridModeData& hyb) {
    const Eigen::Matrix3cd& S = hyb.transform;
    if (((S * S.adjoint()) - Eigen::Matrix3cd::Identity()).norm() > 1e-10)
        throw std::invalid_argument("hybrid transform is not unitary");
    // B = S a  =>  <B_l^dag B_m> = conj(S) C S^T.
    return S.conjugate() * C * S.transpose();
}

double current_13_hybrid(const Eigen::Matrix3cd& C_hyb, const TrimerParams& p,
                         const LinkPhaseAssignment& gauge) {
    if ((C_hyb - C_hyb.adjoint()).norm() > 1e-9 * std::max(1.0, C_hyb.norm()))
        throw std::invalid_argument("hybrid correlations must be Hermitian");
    if (gauge.theta12 != 0.0 || gauge.theta23 != 0.0)
        throw std::invalid_argument("hybrid modes are defined in the all-phase-on-3-1 gauge");
    const double phi = -gauge.theta31;
    const Complex phase = std::exp(kI * phi);
    return (kI * p.j13() * (phase * C_hyb(1, 2) - std::conj(phase) * C_hyb(2, 1))).real();
}

double approx_current_13(const TrimerParams& p) {
    p.validate();
    const double r = p.J / p.gamma;
    return 2.0 * p.J * (p.n_hot() - p.n_cold()) * r * r * std::sin(p.theta);
}

}  // namespace trimer
