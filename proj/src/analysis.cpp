#include "trimer/analysis.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <thread>

namespace trimer {

namespace {

int worker_count() {
    if (const char* env = std::getenv("TRIMER_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Index-parallel map; results land at fixed slots, so output order does
// not depend on scheduling.
template <typename F>
void parallel_for(int n, F&& body) {
    const int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto drain = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

GaussianState reduced_13(const Eigen::Matrix3cd& C) {
    Eigen::Matrix2cd sub;
    sub << C(0, 0), C(0, 2), C(2, 0), C(2, 2);
    return correlations_to_gaussian(CorrelationMatrix(sub));
}

}  // namespace

std::vector<double> theta_grid(int points) {
    if (points < 2) throw std::invalid_argument("theta_grid needs at least 2 points");
    std::vector<double> grid(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<size_t>(i)] = 2.0 * std::numbers::pi * i / (points - 1);
    return grid;
}

std::vector<SteadyStateReport> sweep_theta_lindblad(const TrimerParams& p,
                                                    const std::vector<double>& thetas) {
    std::vector<SteadyStateReport> out(thetas.size());
    parallel_for(static_cast<int>(thetas.size()), [&](int i) {
        TrimerParams q = p;
        q.theta = thetas[static_cast<size_t>(i)];
        out[static_cast<size_t>(i)] =
            steady_state(q, LinkPhaseAssignment::default_gauge(q.theta));
    });
    return out;
}

std::vector<ExactCurrents> sweep_theta_exact(const TrimerParams& p,
                                             const std::vector<double>& thetas,
                                             const ExactOptions& opts) {
    std::vector<ExactCurrents> out(thetas.size());
    parallel_for(static_cast<int>(thetas.size()), [&](int i) {
        TrimerParams q = p;
        q.theta = thetas[static_cast<size_t>(i)];
        out[static_cast<size_t>(i)] =
            quasi_steady_currents(q, LinkPhaseAssignment::default_gauge(q.theta), opts);
    });
    return out;
}

CriticalRatio find_critical_ratio(const TrimerParams& p, double lo, double hi, double tol,
                                  const ExactOptions& opts) {
    if (!(lo > 0.0 && hi > lo) || tol <= 0.0)
        throw std::invalid_argument("find_critical_ratio: bad bracket or tolerance");
    CriticalRatio result;
    auto eval = [&](double ratio) {
        TrimerParams q = p;
        q.J = ratio * p.gamma;
        q.theta = std::numbers::pi / 2.0;
        const ExactCurrents c =
            quasi_steady_currents(q, LinkPhaseAssignment::default_gauge(q.theta), opts);
        const double val = c.current_13 / q.J;
        result.evaluations.emplace_back(ratio, val);
        return val;
    };
    double f_lo = eval(lo), f_hi = eval(hi);
    if (f_lo == 0.0) { result.ratio = result.lo = result.hi = lo; return result; }
    if (f_hi == 0.0) { result.ratio = result.lo = result.hi = hi; return result; }
    if (f_lo * f_hi > 0.0)
        throw std::runtime_error(
            "find_critical_ratio: the 1->3 current does not change sign over the bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = eval(mid);
        if (f_mid == 0.0) { lo = hi = mid; break; }
        if (f_lo * f_mid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    result.lo = lo;
    result.hi = hi;
    result.ratio = 0.5 * (lo + hi);
    return result;
}

std::vector<FidelityPoint> fidelity_comparison(const TrimerParams& p,
                                               const std::vector<double>& ratios,
                                               const std::vector<double>& thetas,
                                               const ExactOptions& opts) {
    std::vector<FidelityPoint> out(ratios.size() * thetas.size());
    parallel_for(static_cast<int>(out.size()), [&](int i) {
        const size_t ir = static_cast<size_t>(i) / thetas.size();
        const size_t it = static_cast<size_t>(i) % thetas.size();
        TrimerParams q = p;
        q.J = ratios[ir] * p.gamma;
        q.theta = thetas[it];
        const auto gauge = LinkPhaseAssignment::default_gauge(q.theta);
        const SteadyStateReport ss = steady_state(q, gauge);
        const ExactCurrents ex = quasi_steady_currents(q, gauge, opts);
        FidelityPoint pt;
        pt.ratio = ratios[ir];
        pt.theta = thetas[it];
        pt.fidelity = fidelity_two_mode(reduced_13(ss.C), reduced_13(ex.C));
        out[static_cast<size_t>(i)] = pt;
    });
    return out;
}

ErrorGrid error_grid(const TrimerParams& p, int n_delta, int n_eps, double range) {
    if (n_delta < 2 || n_eps < 2 || range <= 0.0 || range >= 1.0)
        throw std::invalid_argument("error_grid: bad grid specification");
    ErrorGrid grid;
    grid.deltas.resize(static_cast<size_t>(n_delta));
    grid.epss.resize(static_cast<size_t>(n_eps));
    for (int i = 0; i < n_delta; ++i)
        grid.deltas[static_cast<size_t>(i)] = -range + 2.0 * range * i / (n_delta - 1);
    for (int i = 0; i < n_eps; ++i)
        grid.epss[static_cast<size_t>(i)] = -range + 2.0 * range * i / (n_eps - 1);
    grid.dark_leak.resize(n_delta, n_eps);
    grid.swap_ratio.resize(n_delta, n_eps);
    parallel_for(n_delta * n_eps, [&](int idx) {
        const int i = idx / n_eps, j = idx % n_eps;
        TrimerParams q = p;
        q.delta = grid.deltas[static_cast<size_t>(i)];
        q.eps = grid.epss[static_cast<size_t>(j)];
        q.theta = std::numbers::pi;
        auto at = [&](double theta) {
            TrimerParams r = q;
            r.theta = theta;
            return steady_state(r, LinkPhaseAssignment::default_gauge(theta));
        };
        const SteadyStateReport s_pi = at(std::numbers::pi);
        const SteadyStateReport s_2pi = at(2.0 * std::numbers::pi);
        grid.dark_leak(i, j) = std::abs(s_pi.current_13) / q.J;
        grid.swap_ratio(i, j) = s_2pi.current_23 / s_pi.current_21;
    });
    return grid;
}

BenchmarkReport benchmark_exact(const TrimerParams& p, const ExactOptions& base) {
    const auto gauge = LinkPhaseAssignment::default_gauge(p.theta);
    BenchmarkReport report;
    report.reference_13 = steady_state(p, gauge).current_13;

    const double omega_c_scan[] = {1.0, 1.2, 1.5, 2.0, 2.5, 3.0};
    for (double wc : omega_c_scan) {
        ExactOptions o = base;
        o.omega_c = wc * p.omega;
        const ExactCurrents c = quasi_steady_currents(p, gauge, o);
        report.omega_c_scan.push_back(
            {wc, c.current_13,
             (c.current_13 - report.reference_13) / std::abs(report.reference_13)});
    }
    const int n_scan[] = {100, 200, 400, 800};
    for (int n : n_scan) {
        ExactOptions o = base;
        o.N = n;
        o.ignore_recurrence_guard = true;  // N = 100 brushes the recurrence time
        const ExactCurrents c = quasi_steady_currents(p, gauge, o);
        report.size_scan.push_back(
            {static_cast<double>(n), c.current_13,
             (c.current_13 - report.reference_13) / std::abs(report.reference_13)});
    }
    const double t_scan[] = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    for (double t : t_scan) {
        ExactOptions o = base;
        o.t_ss = t / p.gamma;
        const ExactCurrents c = quasi_steady_currents(p, gauge, o);
        report.time_scan.push_back(
            {t, c.current_13,
             (c.current_13 - report.reference_13) / std::abs(report.reference_13)});
    }
    return report;
}

}  // namespace trimer
