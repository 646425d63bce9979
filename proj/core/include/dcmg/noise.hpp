#pragma once

#include "dcmg/linalg.hpp"

#include <random>

namespace dcmg {

using Rng = std::mt19937_64;

/// Componentwise uniform draw on [-bound, bound]. A zero bound yields an
/// exact zero without consuming the generator.
Vec2 draw_bounded_noise(Rng& rng, const Vec2& bound);
double draw_bounded_noise(Rng& rng, double bound);

}  // namespace dcmg
