#include "trimer/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace trimer {

namespace {
constexpr Complex kI{0.0, 1.0};
}

void CorrelationMatrix::validate(double tol) const {
    if (m.rows() != m.cols()) throw std::invalid_argument("correlation matrix must be square");
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > tol * scale)
        throw std::invalid_argument("correlation matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol * scale)
        throw std::invalid_argument("correlation matrix has negative occupation");
}

void GaussianState::validate(double tol) const {
    const int d = static_cast<int>(V.rows());
    if (d % 2 != 0 || V.cols() != d)
        throw std::invalid_argument("covariance must be square with even dimension");
    const double scale = std::max(1.0, V.norm());
    if ((V - V.transpose()).norm() > tol * scale)
        throw std::invalid_argument("covariance is not symmetric");
    // Heisenberg: V + i*Omega/2 >= 0.
    MatrixXcd test = V.cast<Complex>() + kI * 0.5 * symplectic_form(d / 2).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(test, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol * scale)
        throw std::invalid_argument("covariance violates the uncertainty relation");
}

MatrixXd symplectic_form(int n) {
    MatrixXd T = MatrixXd::Zero(2 * n, 2 * n);
    T.topRightCorner(n, n) = MatrixXd::Identity(n, n);
    T.bottomLeftCorner(n, n) = -MatrixXd::Identity(n, n);
    return T;
}

double bose_occupation(double omega, double T) {
    if (omega <= 0.0 || T <= 0.0)
        throw std::invalid_argument("bose_occupation requires omega > 0 and T > 0");
    const double x = omega / T;
    if (x > 700.0) return 0.0;
    return 1.0 / std::expm1(x);
}

GaussianState thermal_state(int n, double omega, double T) {
    if (n <= 0) throw std::invalid_argument("thermal_state requires n > 0");
    const double d = bose_occupation(omega, T) + 0.5;
    return GaussianState(d * MatrixXd::Identity(2 * n, 2 * n));
}

GaussianState correlations_to_gaussian(const CorrelationMatrix& C) {
    C.validate();
    const int n = C.modes();
    const MatrixXd re = C.m.real();
    const MatrixXd im = C.m.imag();
    MatrixXd V(2 * n, 2 * n);
    V.topLeftCorner(n, n) = re + 0.5 * MatrixXd::Identity(n, n);
    V.bottomRightCorner(n, n) = re + 0.5 * MatrixXd::Identity(n, n);
    V.topRightCorner(n, n) = im;
    V.bottomLeftCorner(n, n) = im.transpose();
    return GaussianState(V);
}

CorrelationDecomposition gaussian_to_correlations(const GaussianState& G) {
    G.validate();
    const int n = G.modes();
    const MatrixXd xx = G.V.topLeftCorner(n, n);
    const MatrixXd pp = G.V.bottomRightCorner(n, n);
    const MatrixXd xp = G.V.topRightCorner(n, n);
    CorrelationDecomposition out;
    out.normal = (0.5 * (xx + pp) - 0.5 * MatrixXd::Identity(n, n)).cast<Complex>() +
                 kI * 0.5 * (xp - xp.transpose()).cast<Complex>();
    out.anomalous = (0.5 * (xx - pp)).cast<Complex>() +
                    kI * 0.5 * (xp + xp.transpose()).cast<Complex>();
    return out;
}

MatrixXcd solve_lyapunov(const MatrixXcd& A, const MatrixXcd& Q) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || Q.rows() != n || Q.cols() != n)
        throw std::invalid_argument("solve_lyapunov dimension mismatch");
    Eigen::ComplexEigenSolver<MatrixXcd> es(A, false);
    if (es.eigenvalues().real().maxCoeff() >= 0.0)
        throw std::runtime_error("no stable steady state: drift matrix is not Hurwitz");
    // Vectorize A X + X A^dag = -Q:  (I (x) A + conj(A) (x) I) vec(X) = -vec(Q).
    MatrixXcd K = MatrixXcd::Zero(n * n, n * n);
    const MatrixXcd Ac = A.conjugate();
    for (int j = 0; j < n; ++j) {
        K.block(j * n, j * n, n, n) += A;
        for (int i = 0; i < n; ++i)
            K.block(j * n, i * n, n, n) += Ac(j, i) * MatrixXcd::Identity(n, n);
    }
    Eigen::VectorXcd q(n * n);
    for (int j = 0; j < n; ++j) q.segment(j * n, n) = -Q.col(j);
    Eigen::VectorXcd x = K.partialPivLu().solve(q);
    MatrixXcd X(n, n);
    for (int j = 0; j < n; ++j) X.col(j) = x.segment(j * n, n);
    return 0.5 * (X + X.adjoint());
}

MatrixXcd propagator(const MatrixXcd& W, double t, double herm_tol) {
    const double scale = std::max(1.0, W.norm());
    if ((W - W.adjoint()).norm() > herm_tol * scale)
        throw std::invalid_argument("propagator requires a Hermitian generator");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(W);
    Eigen::VectorXcd phases =
        (-kI * t * es.eigenvalues().cast<Complex>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity_two_mode(const GaussianState& a, const GaussianState& b) {
    if (a.modes() != 2 || b.modes() != 2)
        throw std::invalid_argument("fidelity_two_mode expects two-mode states");
    a.validate();
    b.validate();
    const MatrixXd Om = symplectic_form(2);
    const MatrixXd V1 = a.V, V2 = b.V;
    const double Delta = (V1 + V2).determinant();
    const MatrixXd I4 = MatrixXd::Identity(4, 4);
    const double Lambda = 16.0 * (Om * V1 * Om * V2 - 0.25 * I4).determinant();
    const MatrixXcd Oc = kI * 0.5 * Om.cast<Complex>();
    const Complex prod =
        (V1.cast<Complex>() + Oc).determinant() * (V2.cast<Complex>() + Oc).determinant();
    const double Phi = 16.0 * prod.real();
    const double root = std::sqrt(std::max(0.0, Lambda)) + std::sqrt(std::max(0.0, Phi));
    const double inner = std::sqrt(std::max(0.0, root * root - Delta));
    const double denom = root - inner;
    if (denom <= 0.0) return 0.0;
    return std::min(1.0, 1.0 / std::sqrt(denom));
}

std::vector<double> thermal_number_distribution(double nbar, int cutoff) {
    std::vector<double> p(static_cast<size_t>(cutoff) + 1);
    const double q = nbar / (1.0 + nbar);
    double w = 1.0 / (1.0 + nbar);
    for (int n = 0; n <= cutoff; ++n) {
        p[static_cast<size_t>(n)] = w;
        w *= q;
    }
    return p;
}

int thermal_cutoff(double nbar, double tail_tol, int cap) {
    if (nbar <= 0.0) return 1;
    const double q = nbar / (1.0 + nbar);
    // Tail mass beyond n is q^(n+1); pick the smallest n below tolerance.
    const double n_real = std::ceil(std::log(tail_tol) / std::log(q));
    if (n_real > cap)
        throw std::runtime_error(
            "thermal_cutoff: occupation too large for the Fock-space cap; "
            "raise the cap or lower the temperature");
    return std::max(static_cast<int>(n_real), 1);
}

std::vector<double> number_distribution(const GaussianState& single_mode, int cutoff) {
    if (single_mode.modes() != 1)
        throw std::invalid_argument("number_distribution expects a single-mode state");
    const MatrixXd& V = single_mode.V;
    const double nbar = 0.5 * (V(0, 0) + V(1, 1)) - 0.5;
    const Complex anom(0.5 * (V(0, 0) - V(1, 1)), V(0, 1));
    if (std::abs(anom) <= 1e-10) {
        auto p = thermal_number_distribution(std::max(nbar, 0.0), cutoff);
        return p;
    }
    // Squeezed thermal: rho = S rho_th(nu) S^dag with symplectic eigenvalue nu.
    const double nu = std::sqrt(std::max(0.25, V.determinant()));
    const double nth = nu - 0.5;
    // Squeeze parameter from nbar = (nth + 1/2) cosh(2r) - 1/2 and phase of anom.
    const double c2r = std::min(std::max((nbar + 0.5) / nu, 1.0), 700.0);
    const double r = 0.5 * std::acosh(c2r);
    const double phi = std::arg(anom);
    const int dim = cutoff + 1 + 16;  // margin absorbs squeeze-operator leakage
    MatrixXcd a = MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Complex xi = r * std::exp(kI * phi);
    const MatrixXcd K = 0.5 * (std::conj(xi) * a * a -
                               xi * (a * a).adjoint());  // skew-Hermitian
    // S = exp(K) = exp(-i (iK)) with iK Hermitian.
    const MatrixXcd S = propagator(kI * K, 1.0);
    Eigen::VectorXd pth(dim);
    {
        auto p = thermal_number_distribution(std::max(nth, 0.0), dim - 1);
        for (int n = 0; n < dim; ++n) pth(n) = p[static_cast<size_t>(n)];
    }
    std::vector<double> out(static_cast<size_t>(cutoff) + 1);
    for (int n = 0; n <= cutoff; ++n) {
        double pn = 0.0;
        for (int k = 0; k < dim; ++k) pn += std::norm(S(n, k)) * pth(k);
        out[static_cast<size_t>(n)] = pn;
    }
    return out;
}

namespace {

double trace_distance(const std::vector<double>& p, double nbar_q) {
    const auto q = thermal_number_distribution(nbar_q, static_cast<int>(p.size()) - 1);
    double d = 0.0;
    for (size_t n = 0; n < p.size(); ++n) d += std::abs(p[n] - q[n]);
    // Account for the thermal tail mass outside the shared cutoff.
    const double qq = nbar_q / (1.0 + nbar_q);
    d += std::pow(qq, static_cast<double>(p.size()));
    double ptail = 1.0;
    for (double v : p) ptail -= v;
    d += std::abs(ptail);
    return 0.5 * d;
}

}  // namespace

EffectiveTemperature effective_temperature(const GaussianState& single_mode,
                                           double omega, double bracket_hi) {
    if (single_mode.modes() != 1)
        throw std::invalid_argument("effective_temperature expects a single-mode state");
    if (omega <= 0.0) throw std::invalid_argument("effective_temperature requires omega > 0");
    single_mode.validate();
    const MatrixXd& V = single_mode.V;
    const double nbar = std::max(0.5 * (V(0, 0) + V(1, 1)) - 0.5, 0.0);
    const Complex anom(0.5 * (V(0, 0) - V(1, 1)), V(0, 1));

    EffectiveTemperature result;
    result.anomalous_magnitude = std::abs(anom);

    const double t_lo = 0.01 * omega;
    const double n_lo = bose_occupation(omega, t_lo);
    if (nbar <= std::max(n_lo, 1e-12)) {
        // Indistinguishable from vacuum at the resolution of the bracket.
        result.T = t_lo;
        result.at_lower_bound = true;
        result.trace_distance = trace_distance(
            number_distribution(single_mode, 8), bose_occupation(omega, t_lo));
        return result;
    }
    const double t_hat = omega / std::log1p(1.0 / nbar);
    const double t_hi = bracket_hi > 0.0 ? bracket_hi : 4.0 * t_hat;
    if (t_hi <= t_lo)
        throw std::invalid_argument("effective_temperature: empty bracket");

    // Shared cutoff: tail below 1e-8 for the largest candidate occupation.
    const double n_hi = bose_occupation(omega, t_hi);
    const int cutoff = thermal_cutoff(std::max({n_hi, nbar * 4.0 + 1.0, 1e-3}), 1e-8);
    const auto p = number_distribution(single_mode, cutoff);

    auto dist = [&](double T) { return trace_distance(p, bose_occupation(omega, T)); };

    // Golden-section minimization of the (unimodal) trace distance.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = t_lo, b = t_hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = dist(c), fd = dist(d);
    while (b - a > 1e-6 * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = dist(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = dist(d);
        }
    }
    result.T = 0.5 * (a + b);
    result.trace_distance = dist(result.T);
    result.at_lower_bound = result.T <= t_lo * (1.0 + 1e-6);
    return result;
}

}  // namespace trimer
