#include "trimer/closed.hpp"

#include "trimer/gaussian.hpp"

namespace trimer {

ClosedRun evolve_closed(const TrimerParams& p, const LinkPhaseAssignment& gauge,
                        int initial_site, const std::vector<double>& times) {
    if (initial_site < 1 || initial_site > 3)
        throw std::invalid_argument("initial_site must be 1, 2 or 3");
    const Eigen::Matrix3cd h = build_single_particle_hamiltonian(p, gauge);
    Eigen::Matrix3cd C0 = Eigen::Matrix3cd::Zero();
    C0(initial_site - 1, initial_site - 1) = 1.0;

    ClosedRun run;
    run.times = times;
    run.C.reserve(times.size());
    run.currents.reserve(times.size());
    run.populations.reserve(times.size());
    for (double t : times) {
        const Eigen::Matrix3cd U = propagator(h, t);
        const Eigen::Matrix3cd C = U.conjugate() * C0 * U.transpose();
        run.C.push_back(C);
        run.currents.push_back({current_expectation(C, Link::L21, p, gauge),
                                current_expectation(C, Link::L23, p, gauge),
                                current_expectation(C, Link::L13, p, gauge)});
        run.populations.push_back({C(0, 0).real(), C(1, 1).real(), C(2, 2).real()});
    }
    return run;
}

}  // namespace trimer
