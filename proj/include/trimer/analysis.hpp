#pragma once

// Higher-level studies built on the solvers: phase sweeps, the critical
// hopping ratio for current reversal, reduced-state fidelity comparisons,
// fabrication-error grids, and convergence benchmarks of the exact bath.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "trimer/exact_bath.hpp"
#include "trimer/lindblad.hpp"

namespace trimer {

// Evenly spaced grid over [0, 2 pi] with `points` samples (inclusive ends).
std::vector<double> theta_grid(int points);

// Steady-state sweep over the loop phase; runs points in parallel across
// the worker pool (size from TRIMER_WORKERS, default hardware concurrency).
std::vector<SteadyStateReport> sweep_theta_lindblad(const TrimerParams& p,
                                                    const std::vector<double>& thetas);

std::vector<ExactCurrents> sweep_theta_exact(const TrimerParams& p,
                                             const std::vector<double>& thetas,
                                             const ExactOptions& opts = {});

struct CriticalRatio {
    double ratio = 0.0;    // J/gamma where the 1->3 current changes sign
    double lo = 0.0;       // final bisection bracket
    double hi = 0.0;
    std::vector<std::pair<double, double>> evaluations;  // (ratio, J13/J)
};

// Bisect the exact-bath <J13>(theta = pi/2) in J/gamma until the bracket is
// narrower than tol. Throws if [lo, hi] does not bracket a sign change.
CriticalRatio find_critical_ratio(const TrimerParams& p, double lo = 0.2, double hi = 1.6,
                                  double tol = 0.02, const ExactOptions& opts = {});

struct FidelityPoint {
    double ratio = 0.0;  // J / gamma
    double theta = 0.0;
    double fidelity = 0.0;  // reduced sites (1,3): master equation vs exact
};

std::vector<FidelityPoint> fidelity_comparison(const TrimerParams& p,
                                               const std::vector<double>& ratios,
                                               const std::vector<double>& thetas,
                                               const ExactOptions& opts = {});

struct ErrorGrid {
    std::vector<double> deltas;  // hopping imbalance axis
    std::vector<double> epss;    // damping imbalance axis
    Eigen::MatrixXd dark_leak;   // |<J13>(pi)| / J  (zero for a clean device)
    Eigen::MatrixXd swap_ratio;  // <J23>(2 pi) / <J21>(pi) (one for a clean device)
};

// Steady-state sensitivity to fabrication errors on a (delta, eps) grid.
ErrorGrid error_grid(const TrimerParams& p, int n_delta = 41, int n_eps = 41,
                     double range = 0.3);

struct BenchmarkRow {
    double x = 0.0;        // swept value (omega_c, N or t_ss)
    double current_13 = 0.0;
    double deviation = 0.0;  // relative to the master-equation reference
};

struct BenchmarkReport {
    double reference_13 = 0.0;              // master-equation <J13>
    std::vector<BenchmarkRow> omega_c_scan;
    std::vector<BenchmarkRow> size_scan;    // N sweep (recurrence guard relaxed)
    std::vector<BenchmarkRow> time_scan;    // t_ss sweep
};

BenchmarkReport benchmark_exact(const TrimerParams& p, const ExactOptions& base = {});

}  // namespace trimer
