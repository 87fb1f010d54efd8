#pragma once

// Unitary dynamics of the isolated loop with a single excitation: the
// baths are switched off and a chosen site starts with one quantum.

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "trimer/model.hpp"

namespace trimer {

struct ClosedRun {
    std::vector<double> times;
    std::vector<Eigen::Matrix3cd> C;                    // correlations at each time
    std::vector<std::array<double, 3>> currents;        // (J21, J23, J13)
    std::vector<std::array<double, 3>> populations;     // site occupations
};

// Evolve C(t) = conj(U) C(0) U^T with U = exp(-i h t) and C(0) holding one
// excitation on `initial_site` (1, 2 or 3).
ClosedRun evolve_closed(const TrimerParams& p, const LinkPhaseAssignment& gauge,
                        int initial_site, const std::vector<double>& times);

}  // namespace trimer
