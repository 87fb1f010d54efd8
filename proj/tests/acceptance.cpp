// Acceptance battery: one check per release criterion, each printing a
// single PASS/FAIL line with the measured numbers. Run all, or a single one
// with --criterion N (used by the test registry).

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "trimer/analysis.hpp"
#include "trimer/closed.hpp"
#include "trimer/fock.hpp"

using namespace trimer;
using std::numbers::pi;

namespace {

TrimerParams defaults() {
    TrimerParams p;
    p.omega = 1.0;
    p.gamma = 0.03;
    p.J = 0.1 * p.gamma;
    p.T_hot = 5.0;
    p.T_cold = 3.0;
    return p;
}

struct Check {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok) { pass = pass && ok; }
};

double wall_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Weak-coupling current law: <J13>(theta) ~ c sin(theta) with the
//    closed-form amplitude.
Check criterion_1() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    TrimerParams p = defaults();
    const auto thetas = theta_grid(101);
    const auto sweep = sweep_theta_lindblad(p, thetas);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < thetas.size(); ++i) {
        num += sweep[i].current_13 * std::sin(thetas[i]);
        den += std::sin(thetas[i]) * std::sin(thetas[i]);
    }
    const double amp = num / den;
    double resid2 = 0.0, norm2 = 0.0;
    for (size_t i = 0; i < thetas.size(); ++i) {
        const double r = sweep[i].current_13 - amp * std::sin(thetas[i]);
        resid2 += r * r;
        norm2 += sweep[i].current_13 * sweep[i].current_13;
    }
    const double residual = std::sqrt(resid2 / norm2);
    TrimerParams ref = p;
    ref.theta = pi / 2.0;
    const double c_ref = approx_current_13(ref);
    const double amp_err = std::abs(amp - c_ref) / std::abs(c_ref);
    const double wall = wall_since(t0);
    c.require(residual < 0.05);
    c.require(amp_err <= 0.10);
    c.require(wall < 5.0);
    c.detail << "sine-fit residual " << residual << ", c/J = " << amp / p.J
             << " vs closed form " << c_ref / p.J << " (rel err " << amp_err
             << "), wall " << wall << " s";
    return c;
}

// 2. Dark-mode nulls and symmetric side currents at theta = n pi.
Check criterion_2() {
    Check c;
    const TrimerParams p = defaults();
    for (double theta : {0.0, pi, 2.0 * pi}) {
        TrimerParams q = p;
        q.theta = theta;
        const SteadyStateReport r =
            steady_state(q, LinkPhaseAssignment::default_gauge(theta));
        c.require(std::abs(r.current_13) <= 1e-9 * p.J);
        c.require(std::abs(r.current_21 - r.current_23) <= 1e-9 * p.J);
        c.detail << "theta=" << theta << ": |J13|/J = " << std::abs(r.current_13) / p.J
                 << ", |J21-J23|/J = " << std::abs(r.current_21 - r.current_23) / p.J
                 << "; ";
    }
    return c;
}

// 3. Second law with effective temperatures; entropy extrema locations.
Check criterion_3() {
    Check c;
    const auto thetas = theta_grid(101);
    const auto sweep = sweep_theta_lindblad(defaults(), thetas);
    size_t argmax = 0, argmin = 0;
    for (size_t i = 0; i < sweep.size(); ++i) {
        c.require(-sweep[i].entropy_production <= 1e-10);
        if (sweep[i].entropy_production > sweep[argmax].entropy_production) argmax = i;
        if (sweep[i].entropy_production < sweep[argmin].entropy_production) argmin = i;
    }
    const bool max_at_npi = (argmax == 0 || argmax == 50 || argmax == 100);
    const bool min_at_half = (argmin == 25 || argmin == 75);
    c.require(max_at_npi);
    c.require(min_at_half);
    c.detail << "min entropy " << sweep[argmin].entropy_production << " at theta = "
             << thetas[argmin] << ", max at theta = " << thetas[argmax];
    return c;
}

// 4. Effective temperature symmetry and ordering.
Check criterion_4() {
    Check c;
    for (double theta : {0.0, pi, 2.0 * pi}) {
        TrimerParams q = defaults();
        q.theta = theta;
        const SteadyStateReport r =
            steady_state(q, LinkPhaseAssignment::default_gauge(theta));
        c.require(std::abs(r.T_eff[0] - r.T_eff[2]) <= 1e-5);
    }
    const auto thetas = theta_grid(101);
    const auto sweep = sweep_theta_lindblad(defaults(), thetas);
    double worst_gap = 1.0;
    for (size_t i = 1; i < 50; ++i) {  // theta strictly inside (0, pi)
        worst_gap = std::min(worst_gap, sweep[i].T_eff[2] - sweep[i].T_eff[0]);
        c.require(sweep[i].T_eff[0] < sweep[i].T_eff[2]);
    }
    c.detail << "T1 = T3 at n pi within 1e-5; min (T3 - T1) on (0, pi) = " << worst_gap;
    return c;
}

// 5. Oracle equivalence over randomized parameter tuples.
Check criterion_5() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u_ratio(0.05, 1.0), u_theta(0.0, 2.0 * pi),
        u_imb(-0.2, 0.2);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        TrimerParams p;
        p.omega = 1.0;
        p.gamma = 0.4;
        p.J = u_ratio(rng) * p.gamma;
        p.theta = u_theta(rng);
        p.T_hot = 0.4;
        p.T_cold = 0.25;
        p.delta = u_imb(rng);
        p.eps = u_imb(rng);
        const auto gauge = LinkPhaseAssignment::default_gauge(p.theta);
        const FockSteadyState fs = integrate_to_steady(p, gauge);
        const SteadyStateReport ss = steady_state(p, gauge);
        worst = std::max(worst, (fs.C - ss.C).cwiseAbs().maxCoeff());
    }
    const double wall = wall_since(t0);
    c.require(worst < 1e-6);
    c.require(wall < 120.0);
    c.detail << "worst elementwise |C_fock - C_lindblad| = " << worst << " over 10 tuples, wall "
             << wall << " s";
    return c;
}

// 6. Exact bath vs master equation at weak coupling, pinned bath settings.
Check criterion_6() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    TrimerParams p = defaults();
    p.theta = pi / 2.0;
    const auto gauge = LinkPhaseAssignment::default_gauge(p.theta);
    ExactOptions o;  // N = 400, omega_c = 3 omega, t_ss = 6/gamma
    const ExactCurrents ex = quasi_steady_currents(p, gauge, o);
    const SteadyStateReport ss = steady_state(p, gauge);
    const double dev = std::abs(ex.current_13 - ss.current_13) / std::abs(ss.current_13);
    const double wall = wall_since(t0);
    c.require(dev <= 0.15);
    c.require(wall < 120.0);
    c.detail << "exact J13/J = " << ex.current_13 / p.J << ", master equation "
             << ss.current_13 / p.J << ", deviation " << dev << " (tolerance 0.15), wall "
             << wall << " s";
    return c;
}

// 7. Phase reversal of the circulation above the critical coupling.
Check criterion_7() {
    Check c;
    TrimerParams p = defaults();
    p.J = 1.2 * p.gamma;
    p.theta = pi / 2.0;
    ExactOptions o;
    const ExactCurrents at_half =
        quasi_steady_currents(p, LinkPhaseAssignment::default_gauge(p.theta), o);
    c.require(at_half.current_13 < 0.0);
    c.require(at_half.current_23 < 0.0);
    double min_total = 1e300;
    for (double theta : theta_grid(21)) {
        TrimerParams q = p;
        q.theta = theta;
        const ExactCurrents e =
            quasi_steady_currents(q, LinkPhaseAssignment::default_gauge(theta), o);
        min_total = std::min(min_total, e.current_21 + e.current_23);
    }
    c.require(min_total > 0.0);
    c.detail << "J13(pi/2)/J = " << at_half.current_13 / p.J << ", J23(pi/2)/J = "
             << at_half.current_23 / p.J << " (J21(pi/2)/J = " << at_half.current_21 / p.J
             << "), min total output/J = " << min_total / p.J;
    return c;
}

// 8. Critical coupling ratio versus cold-bath temperature.
Check criterion_8() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> ratios;
    for (double tc : {3.0, 3.5, 4.0, 4.5}) {
        TrimerParams p = defaults();
        p.T_cold = tc;
        const double lo = tc < 4.2 ? 0.2 : 0.6;
        const double hi = tc < 4.2 ? 0.8 : 1.6;
        const CriticalRatio cr = find_critical_ratio(p, lo, hi, 0.02);
        ratios.push_back(cr.ratio);
        c.detail << "T_C=" << tc << ": " << cr.ratio << "; ";
    }
    c.require(std::abs(ratios[0] - 0.46) <= 0.05);
    c.require(std::abs(ratios[3] - 1.0) <= 0.1);
    for (size_t i = 1; i < ratios.size(); ++i) c.require(ratios[i] > ratios[i - 1]);
    c.detail << "wall " << wall_since(t0) << " s";
    return c;
}

// 9. Reduced-state fidelity between the two solvers.
Check criterion_9() {
    Check c;
    const TrimerParams p = defaults();
    ExactOptions o;
    const auto weak = fidelity_comparison(p, {0.1}, theta_grid(21), o);
    double min_weak = 1.0, at_half_weak = 1.0;
    for (const auto& pt : weak) {
        min_weak = std::min(min_weak, pt.fidelity);
        if (std::abs(pt.theta - pi / 2.0) < 0.2) at_half_weak = pt.fidelity;
    }
    c.require(min_weak > 0.99);
    const auto strong = fidelity_comparison(p, {0.6, 1.2}, {pi / 2.0}, o);
    for (const auto& pt : strong) c.require(pt.fidelity < at_half_weak);
    c.detail << "min F(J/gamma=0.1) = " << min_weak << "; F(pi/2) at 0.6 = "
             << strong[0].fidelity << ", at 1.2 = " << strong[1].fidelity
             << " vs weak " << at_half_weak;
    return c;
}

// 10. Closed-system conservation, silence at n pi, and chirality flip.
Check criterion_10() {
    Check c;
    TrimerParams p = defaults();
    p.J = 0.05;
    std::vector<double> times(121);
    for (size_t i = 0; i < times.size(); ++i)
        times[i] = 6.0 * static_cast<double>(i) / 120.0 / p.J;
    double worst_norm = 0.0;
    for (double theta : {0.0, pi / 2.0, pi, 3.0 * pi / 2.0}) {
        TrimerParams q = p;
        q.theta = theta;
        const ClosedRun run =
            evolve_closed(q, LinkPhaseAssignment::default_gauge(theta), 2, times);
        for (size_t k = 0; k < times.size(); ++k) {
            const auto& n = run.populations[k];
            worst_norm = std::max(worst_norm, std::abs(n[0] + n[1] + n[2] - 1.0));
            if (theta == 0.0 || theta == pi)
                c.require(std::abs(run.currents[k][2]) <= 1e-10 * p.J);
        }
    }
    c.require(worst_norm <= 1e-10);
    const std::vector<double> t2{2.0 / p.J};
    TrimerParams qa = p, qb = p;
    qa.theta = pi / 2.0;
    qb.theta = 3.0 * pi / 2.0;
    const double ja =
        evolve_closed(qa, LinkPhaseAssignment::default_gauge(qa.theta), 2, t2).currents[0][2];
    const double jb =
        evolve_closed(qb, LinkPhaseAssignment::default_gauge(qb.theta), 2, t2).currents[0][2];
    c.require(ja * jb < 0.0);
    c.detail << "norm drift " << worst_norm << "; J13(Jt=2)/J = " << ja / p.J
             << " at pi/2 vs " << jb / p.J << " at 3 pi/2";
    return c;
}

// 11. Robustness grid: clean origin, damping imbalance leaks current.
Check criterion_11() {
    Check c;
    const ErrorGrid grid = error_grid(defaults(), 5, 5, 0.3);
    c.require(grid.dark_leak(2, 2) <= 1e-9);
    c.require(std::abs(grid.swap_ratio(2, 2) - 1.0) <= 1e-9);
    for (int j : {0, 1, 3, 4})  // eps != 0 along the delta = 0 row
        c.require(grid.dark_leak(2, j) > 1e-9);
    c.detail << "origin leak " << grid.dark_leak(2, 2) << ", swap "
             << grid.swap_ratio(2, 2) << "; leak at eps=+-0.3: " << grid.dark_leak(2, 0)
             << ", " << grid.dark_leak(2, 4);
    return c;
}

// 12. Convergence tables of the exact bath show the expected thresholds.
Check criterion_12() {
    Check c;
    TrimerParams p = defaults();
    p.theta = pi / 2.0;
    const BenchmarkReport rep = benchmark_exact(p);
    double dev_12 = 0.0, dev_15 = 0.0;
    for (const auto& row : rep.omega_c_scan) {
        if (std::abs(row.x - 1.2) < 1e-9) dev_12 = row.deviation;
        if (std::abs(row.x - 1.5) < 1e-9) dev_15 = row.deviation;
    }
    c.require(std::abs(dev_15) <= 0.15);     // agreement band entered at 1.5
    c.require(std::abs(dev_12) > std::abs(dev_15));

    double size_min = 1e300, size_max = -1e300;
    for (const auto& row : rep.size_scan) {
        size_min = std::min(size_min, row.current_13);
        size_max = std::max(size_max, row.current_13);
    }
    const double size_spread = (size_max - size_min) / std::abs(0.5 * (size_max + size_min));
    c.require(size_spread <= 0.05);  // N-flat across 100..800

    double final_13 = rep.time_scan.back().current_13;
    double worst_plateau = 0.0;
    for (const auto& row : rep.time_scan)
        if (row.x >= 2.0)  // t_ss beyond two equilibration times
            worst_plateau = std::max(
                worst_plateau, std::abs(row.current_13 - final_13) / std::abs(final_13));
    c.require(worst_plateau <= 0.05);
    c.detail << "dev(omega_c=1.5) = " << dev_15 << ", dev(1.2) = " << dev_12
             << "; N spread " << size_spread << "; plateau wobble (t >= 2/gamma) "
             << worst_plateau;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc - 1; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);

    using Fn = Check (*)();
    const Fn checks[12] = {criterion_1, criterion_2, criterion_3, criterion_4,
                           criterion_5, criterion_6, criterion_7, criterion_8,
                           criterion_9, criterion_10, criterion_11, criterion_12};
    int failures = 0;
    for (int k = 1; k <= 12; ++k) {
        if (only != 0 && k != only) continue;
        Check c;
        try {
            c = checks[k - 1]();
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail << "exception: " << e.what();
        }
        std::cout << "criterion " << k << ": " << (c.pass ? "PASS" : "FAIL") << " - "
                  << c.detail.str() << "\n";
        if (!c.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
