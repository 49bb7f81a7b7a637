#pragma once

#include <string>

#include "hclab/hs_lift.hpp"
#include "hclab/linalg.hpp"

// Hand-typed vectors, balls and matrices for the command line.
//
//   vector   "e1", "e1+0.5e3", "-2e2", "0"       (coefficients are real)
//   ball     "<vector>:<radius>" or "@file.json" with {"center": [...], "radius": r}
//   matrix   "e1xe2" (the rank-one map e_2 -> e_1), sums such as "e1xe1+0.5e2xe3",
//            or "@file.json" holding a list of rows
//
// Note "0.5e3" is 0.5 times e_3, never 500.

namespace hclab {

CVector parse_vector(const std::string& text);
Ball parse_ball(const std::string& text);
/// Square matrix of size max(min_dim, largest index used).
CMatrix parse_matrix(const std::string& text, std::size_t min_dim = 1);

} // namespace hclab
