#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "trimer/exact_bath.hpp"
#include "trimer/lindblad.hpp"

using namespace trimer;
using std::numbers::pi;

namespace {

TrimerParams weak_params(double theta) {
    TrimerParams p;
    p.omega = 1.0;
    p.gamma = 0.03;
    p.J = 0.1 * p.gamma;
    p.theta = theta;
    p.T_hot = 5.0;
    p.T_cold = 3.0;
    return p;
}

}  // namespace

TEST_CASE("bath discretization follows the flat-response rule") {
    const BathDiscretization b = discretize_bath(200, 3.0, 0.03, 1.0);
    CHECK(b.omegas.size() == 200);
    CHECK(b.omegas(0) == doctest::Approx(3.0 / 200));
    CHECK(b.omegas(199) == doctest::Approx(3.0));
    for (int j : {0, 57, 199})
        CHECK(b.couplings(j) ==
              doctest::Approx(std::sqrt((j + 1) * 0.03 / (2.0 * pi)) * 3.0 / 200));
    CHECK_THROWS_AS(discretize_bath(0, 3.0, 0.03, 1.0), std::invalid_argument);
}

TEST_CASE("composite layout wires the shared cold bath to both edge sites") {
    TrimerParams p = weak_params(0.7);
    p.eps = 0.2;
    const CompositeModel m =
        build_composite(p, LinkPhaseAssignment::default_gauge(0.7), 50, 2.0);
    CHECK(m.modes() == 103);
    CHECK((m.W - m.W.adjoint()).norm() < 1e-14);
    const int i1 = m.idx_site(1), i2 = m.idx_site(2), i3 = m.idx_site(3);
    CHECK(i2 == 0);
    // System block carries the loop phase.
    CHECK(std::abs(m.W(i1, i3) - p.J * std::exp(Complex(0.0, -0.7))) < 1e-14);
    // Hot bath touches only site 2; cold rows are sqrt(1 +- eps) rescaled.
    CHECK(std::abs(m.W(i1, 1)) == doctest::Approx(0.0));
    CHECK(std::abs(m.W(i2, 1)) > 0.0);
    const int c0 = i3 + 1;
    CHECK(std::abs(m.W(i1, c0) / m.W(i3, c0)) ==
          doctest::Approx(std::sqrt(1.2 / 0.8)));
    // Initial occupations are thermal at each mode's own frequency.
    CHECK(m.occupations(i2) == doctest::Approx(p.n_hot()));
    CHECK(m.occupations(c0) ==
          doctest::Approx(bose_occupation(m.W(c0, c0).real(), p.T_cold)));
}

TEST_CASE("full covariance propagation matches the fast extraction path") {
    const TrimerParams p = weak_params(pi / 2.0);
    const auto gauge = LinkPhaseAssignment::default_gauge(p.theta);
    const int N = 40;
    const double t = 30.0, wc = 1.5;
    const CompositeModel m = build_composite(p, gauge, N, wc);
    const GaussianState cov0 = initial_covariance(m);
    const GaussianState cov_t = propagate(m, cov0, t);
    cov_t.validate();
    const CorrelationDecomposition sys = extract_system_correlations(m, cov_t);
    CHECK(sys.anomalous.norm() < 1e-10);  // number-conserving dynamics

    ExactOptions opts;
    opts.N = N;
    opts.omega_c = wc;
    opts.t_ss = t;
    const ExactCurrents fast = quasi_steady_currents(p, gauge, opts);
    CHECK((sys.normal - fast.C).cwiseAbs().maxCoeff() < 1e-10);

    // Unitarity: total particle number is conserved.
    const auto full0 = gaussian_to_correlations(cov0);
    const auto fullt = gaussian_to_correlations(cov_t);
    CHECK(fullt.normal.trace().real() ==
          doctest::Approx(full0.normal.trace().real()).epsilon(1e-10));
}

TEST_CASE("decoupled system thermalizes to its bath occupation") {
    TrimerParams p = weak_params(0.0);
    p.J = 0.0;  // no hopping: each site equilibrates with its own reservoir
    ExactOptions opts;
    opts.N = 400;
    opts.omega_c = 1.5;
    opts.t_ss = 200.0;
    const ExactCurrents c =
        quasi_steady_currents(p, LinkPhaseAssignment::default_gauge(0.0), opts);
    CHECK(c.C(1, 1).real() == doctest::Approx(p.n_hot()).epsilon(0.05));
    CHECK(c.C(0, 0).real() == doctest::Approx(p.n_cold()).epsilon(0.05));
    CHECK(c.C(2, 2).real() == doctest::Approx(p.n_cold()).epsilon(0.05));
    CHECK(std::abs(c.current_13) < 1e-10);
}

TEST_CASE("weak coupling reproduces the master equation near its validity window") {
    const TrimerParams p = weak_params(pi / 2.0);
    const auto gauge = LinkPhaseAssignment::default_gauge(p.theta);
    ExactOptions opts;
    opts.N = 400;
    opts.omega_c = 1.5;
    const ExactCurrents ex = quasi_steady_currents(p, gauge, opts);
    const SteadyStateReport ss = steady_state(p, gauge);
    CHECK(ex.current_13 == doctest::Approx(ss.current_13).epsilon(0.15));
    CHECK(ex.current_21 > 0.0);
    CHECK(ex.current_23 > 0.0);
    CHECK(ex.drift < 0.05);
    CHECK(ex.t_recurrence == doctest::Approx(2.0 * pi * 400 / 1.5));
}

TEST_CASE("recurrence guard rejects runs that outlast the finite bath") {
    const TrimerParams p = weak_params(0.5);
    ExactOptions opts;
    opts.N = 50;           // recurrence ~ 105 time units
    opts.omega_c = 3.0;    // default t_ss = 200 overshoots it
    CHECK_THROWS_AS(
        quasi_steady_currents(p, LinkPhaseAssignment::default_gauge(0.5), opts),
        std::runtime_error);
    opts.ignore_recurrence_guard = true;
    CHECK_NOTHROW(quasi_steady_currents(p, LinkPhaseAssignment::default_gauge(0.5), opts));
}
