#pragma once

#include <span>
#include <vector>

#include "pcskm/constraints.hpp"
#include "pcskm/dataset.hpp"

namespace pcskm::detail {

// cost * Sum_j w_j f_j (MUST-LINK) or cost * Sum_j w_j fbar_j (CANNOT-LINK), one entry per
// constraint in set order.
std::vector<double> violation_costs(const DataMatrix& m, const ConstraintSet& constraints,
                                    std::span<const double> w, const MaxSeparatedPair& pair);

}  // namespace pcskm::detail
