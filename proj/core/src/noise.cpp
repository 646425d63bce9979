#include "dcmg/noise.hpp"

#include <stdexcept>

namespace dcmg {

double draw_bounded_noise(Rng& rng, double bound)
{
    if (bound < 0.0) {
        throw std::invalid_argument("noise bound must be non-negative");
    }
    if (bound == 0.0) {
        return 0.0;
    }
    std::uniform_real_distribution<double> dist(-bound, bound);
    return dist(rng);
}

Vec2 draw_bounded_noise(Rng& rng, const Vec2& bound)
{
    const double a = draw_bounded_noise(rng, bound(0));
    const double b = draw_bounded_noise(rng, bound(1));
    return {a, b};
}

}  // namespace dcmg
