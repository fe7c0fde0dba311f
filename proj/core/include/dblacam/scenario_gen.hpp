#pragma once

#include <cstdint>

#include "dblacam/scenario.hpp"

namespace dblacam {

/// N unicycles on a circle, goals antipodal (everyone swaps through the
/// center), headings facing the goal.
Scenario gen_circle(int n, double radius, uint64_t seed);

/// Random boxes covering ~`density` of a size x size workspace, with
/// rejection-sampled collision-free starts and goals for n unicycles.
Scenario gen_random2d(int n, double size, double density, uint64_t seed);

/// Two unicycles facing each other in a corridor, goals exchanged; the
/// canonical livelock pair.
Scenario gen_headon2(uint64_t seed);

/// N robots alternating unicycle / planar double integrator on a circle,
/// goals antipodal.
Scenario gen_swap_hetero(int n, uint64_t seed);

}  // namespace dblacam
