#include "trimer/exact_bath.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace trimer {

namespace {
constexpr Complex kI{0.0, 1.0};
}

BathDiscretization discretize_bath(int N, double omega_c, double gamma, double omega) {
    if (N <= 0 || omega_c <= 0.0 || gamma <= 0.0 || omega <= 0.0)
        throw std::invalid_argument("discretize_bath requires positive arguments");
    BathDiscretization b;
    b.omegas.resize(N);
    b.couplings.resize(N);
    for (int j = 1; j <= N; ++j) {
        b.omegas(j - 1) = omega_c * j / N;
        b.couplings(j - 1) =
            std::sqrt(j * gamma / (2.0 * std::numbers::pi * omega)) * omega_c / N;
    }
    return b;
}

CompositeModel build_composite(const TrimerParams& p, const LinkPhaseAssignment& gauge,
                               int N, double omega_c) {
    p.validate();
    const BathDiscretization bath = discretize_bath(N, omega_c, p.gamma, p.omega);
    CompositeModel m;
    m.N = N;
    m.omega_c = omega_c;
    const int M = m.modes();
    m.W = MatrixXcd::Zero(M, M);
    m.occupations = Eigen::VectorXd::Zero(M);

    const int i1 = m.idx_site(1), i2 = m.idx_site(2), i3 = m.idx_site(3);
    const Eigen::Matrix3cd h = build_single_particle_hamiltonian(p, gauge);
    const int map[3] = {i1, i2, i3};
    for (int l = 0; l < 3; ++l)
        for (int k = 0; k < 3; ++k) m.W(map[l], map[k]) = h(l, k);

    m.occupations(i2) = p.n_hot();
    m.occupations(i1) = p.n_cold();
    m.occupations(i3) = p.n_cold();

    // Hot bath attaches to site 2; the shared cold bath couples to both
    // site 1 and site 3, with the eps imbalance split as sqrt(1 +- eps).
    const double s1 = std::sqrt(1.0 + p.eps), s3 = std::sqrt(1.0 - p.eps);
    for (int j = 0; j < N; ++j) {
        const int hj = 1 + j;
        const int cj = i3 + 1 + j;
        m.W(hj, hj) = bath.omegas(j);
        m.W(cj, cj) = bath.omegas(j);
        m.W(i2, hj) = bath.couplings(j);
        m.W(hj, i2) = bath.couplings(j);
        m.W(i1, cj) = s1 * bath.couplings(j);
        m.W(cj, i1) = s1 * bath.couplings(j);
        m.W(i3, cj) = s3 * bath.couplings(j);
        m.W(cj, i3) = s3 * bath.couplings(j);
        m.occupations(hj) = bose_occupation(bath.omegas(j), p.T_hot);
        m.occupations(cj) = bose_occupation(bath.omegas(j), p.T_cold);
    }
    return m;
}

GaussianState initial_covariance(const CompositeModel& model) {
    const int M = model.modes();
    Eigen::VectorXd d(2 * M);
    d.head(M) = model.occupations.array() + 0.5;
    d.tail(M) = model.occupations.array() + 0.5;
    return GaussianState(d.asDiagonal());
}

GaussianState propagate(const CompositeModel& model, const GaussianState& cov, double t) {
    const int M = model.modes();
    if (cov.V.rows() != 2 * M)
        throw std::invalid_argument("propagate: covariance size does not match the model");
    const MatrixXcd U = propagator(model.W, t);
    const MatrixXd psi_r = U.real();
    const MatrixXd psi_i = U.imag();
    MatrixXd S(2 * M, 2 * M);
    S.topLeftCorner(M, M) = psi_r;
    S.topRightCorner(M, M) = -psi_i;
    S.bottomLeftCorner(M, M) = psi_i;
    S.bottomRightCorner(M, M) = psi_r;
    return GaussianState(S * cov.V * S.transpose());
}

CorrelationDecomposition extract_system_correlations(const CompositeModel& model,
                                                     const GaussianState& cov) {
    const int M = model.modes();
    if (cov.V.rows() != 2 * M)
        throw std::invalid_argument("extract: covariance size does not match the model");
    const int map[3] = {model.idx_site(1), model.idx_site(2), model.idx_site(3)};
    MatrixXd sub(6, 6);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            sub(r, c) = cov.V(map[r], map[c]);
            sub(r, c + 3) = cov.V(map[r], M + map[c]);
            sub(r + 3, c) = cov.V(M + map[r], map[c]);
            sub(r + 3, c + 3) = cov.V(M + map[r], M + map[c]);
        }
    return gaussian_to_correlations(GaussianState(sub));
}

namespace {

// System-row correlations at time t: C_sys = conj(U_sys) diag(occ) U_sys^T,
// valid because the initial covariance is diagonal (product thermal).
Eigen::Matrix3cd system_correlations_fast(const CompositeModel& model,
                                          const Eigen::SelfAdjointEigenSolver<MatrixXcd>& es,
                                          double t) {
    const int M = model.modes();
    Eigen::VectorXcd phases = (-kI * t * es.eigenvalues().cast<Complex>()).array().exp();
    const int map[3] = {model.idx_site(1), model.idx_site(2), model.idx_site(3)};
    Eigen::Matrix<Complex, 3, Eigen::Dynamic> rows(3, M);
    for (int r = 0; r < 3; ++r)
        rows.row(r) = es.eigenvectors().row(map[r]).cwiseProduct(phases.transpose());
    const Eigen::Matrix<Complex, 3, Eigen::Dynamic> u_sys =
        rows * es.eigenvectors().adjoint();
    return (u_sys.conjugate() * model.occupations.asDiagonal() * u_sys.transpose());
}

}  // namespace

ExactCurrents quasi_steady_currents(const TrimerParams& p, const LinkPhaseAssignment& gauge,
                                    const ExactOptions& opts) {
    const double omega_c = opts.omega_c > 0.0 ? opts.omega_c : 3.0 * p.omega;
    const double t_ss = opts.t_ss > 0.0 ? opts.t_ss : 6.0 / p.gamma;
    const double t_rec = 2.0 * std::numbers::pi * opts.N / omega_c;
    if (!opts.ignore_recurrence_guard && t_ss > 0.8 * t_rec)
        throw std::runtime_error(
            "quasi-steady time runs into the bath recurrence (t_ss > 0.8 * 2 pi N / "
            "omega_c); increase N or shorten t_ss");

    const CompositeModel model = build_composite(p, gauge, opts.N, omega_c);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(model.W);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("composite eigendecomposition failed");

    ExactCurrents out;
    out.t_ss = t_ss;
    out.t_recurrence = t_rec;
    out.C = system_correlations_fast(model, es, t_ss);
    out.current_21 = current_expectation(out.C, Link::L21, p, gauge);
    out.current_23 = current_expectation(out.C, Link::L23, p, gauge);
    out.current_13 = current_expectation(out.C, Link::L13, p, gauge);

    // Steadiness diagnostic: relative change over the last 1/gamma.
    const Eigen::Matrix3cd C_prev =
        system_correlations_fast(model, es, t_ss - 1.0 / p.gamma);
    const double j21p = current_expectation(C_prev, Link::L21, p, gauge);
    const double j23p = current_expectation(C_prev, Link::L23, p, gauge);
    const double j13p = current_expectation(C_prev, Link::L13, p, gauge);
    const double scale = std::max({std::abs(out.current_21), std::abs(out.current_23),
                                   std::abs(out.current_13), 1e-12 * p.J});
    out.drift = std::max({std::abs(out.current_21 - j21p), std::abs(out.current_23 - j23p),
                          std::abs(out.current_13 - j13p)}) /
                scale;
    return out;
}

}  // namespace trimer
