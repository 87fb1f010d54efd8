#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "trimer/closed.hpp"

using namespace trimer;
using std::numbers::pi;

namespace {

TrimerParams closed_params(double theta) {
    TrimerParams p;
    p.omega = 1.0;
    p.J = 0.05;
    p.gamma = 0.01;  // unused by the unitary evolution
    p.theta = theta;
    p.T_hot = 5.0;
    p.T_cold = 3.0;
    return p;
}

std::vector<double> time_grid(const TrimerParams& p, int n, double jt_max) {
    std::vector<double> t(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<size_t>(i)] = jt_max * i / (n - 1) / p.J;
    return t;
}

}  // namespace

TEST_CASE("single excitation stays normalized and positive") {
    const TrimerParams p = closed_params(pi / 2.0);
    const auto gauge = LinkPhaseAssignment::default_gauge(p.theta);
    const ClosedRun run = evolve_closed(p, gauge, 2, time_grid(p, 41, 6.0));
    for (size_t k = 0; k < run.times.size(); ++k) {
        const auto& pop = run.populations[k];
        CHECK(std::abs(pop[0] + pop[1] + pop[2] - 1.0) < 1e-12);
        for (double n : pop) CHECK(n > -1e-12);
        // One excitation in a pure state: C is a rank-one projector.
        const Eigen::Matrix3cd C = run.C[k];
        CHECK((C * C - C).norm() < 1e-12);
    }
    CHECK_THROWS_AS(evolve_closed(p, gauge, 0, {0.0}), std::invalid_argument);
}

TEST_CASE("currents do not depend on the common frequency") {
    TrimerParams p = closed_params(1.2);
    const auto gauge = LinkPhaseAssignment::default_gauge(p.theta);
    const auto times = time_grid(p, 21, 4.0);
    const ClosedRun a = evolve_closed(p, gauge, 2, times);
    p.omega = 7.3;
    const ClosedRun b = evolve_closed(p, gauge, 2, times);
    for (size_t k = 0; k < times.size(); ++k)
        for (int l = 0; l < 3; ++l)
            CHECK(a.currents[k][static_cast<size_t>(l)] ==
                  doctest::Approx(b.currents[k][static_cast<size_t>(l)]).epsilon(1e-9));
}

TEST_CASE("the 1-3 link is silent at theta = n pi") {
    for (double theta : {0.0, pi}) {
        const TrimerParams p = closed_params(theta);
        const auto gauge = LinkPhaseAssignment::default_gauge(theta);
        const ClosedRun run = evolve_closed(p, gauge, 2, time_grid(p, 61, 8.0));
        for (const auto& j : run.currents) CHECK(std::abs(j[2]) < 1e-10 * p.J);
    }
}

TEST_CASE("transfer direction at Jt = 2 flips with the flux sign") {
    const TrimerParams pa = closed_params(pi / 2.0);
    const TrimerParams pb = closed_params(3.0 * pi / 2.0);
    const std::vector<double> t{2.0 / pa.J};
    const ClosedRun a =
        evolve_closed(pa, LinkPhaseAssignment::default_gauge(pa.theta), 2, t);
    const ClosedRun b =
        evolve_closed(pb, LinkPhaseAssignment::default_gauge(pb.theta), 2, t);
    CHECK(a.currents[0][2] * b.currents[0][2] < 0.0);
    CHECK(std::abs(a.currents[0][2]) / pa.J > 0.5);  // strongly chiral at this point
    // Mirror images of each other.
    CHECK(a.currents[0][2] == doctest::Approx(-b.currents[0][2]).epsilon(1e-10));
}

TEST_CASE("populations return at the exchange revival") {
    // With theta = pi/2 the single-particle spectrum is commensurate and the
    // excitation refocuses on the start site with period J t = 2 pi / sqrt(3)
    // ... checked numerically as a coarse revival of > 90% population.
    const TrimerParams p = closed_params(pi / 2.0);
    const auto gauge = LinkPhaseAssignment::default_gauge(p.theta);
    const ClosedRun run = evolve_closed(p, gauge, 2, time_grid(p, 601, 30.0));
    double best = 0.0;
    for (size_t k = 10; k < run.times.size(); ++k)
        best = std::max(best, run.populations[k][1]);
    CHECK(best > 0.9);
}
