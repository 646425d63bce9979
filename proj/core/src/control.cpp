#include "dcmg/control.hpp"

#include <cmath>

namespace dcmg {

double PrimaryController::step(const Vec2& local_output, double reference_voltage, double alpha)
{
    accumulated_ += reference_voltage + alpha - local_output(0);
    return hold(local_output);
}

double PrimaryController::hold(const Vec2& local_output) const
{
    return gains_.proportional.dot(local_output) + gains_.integral * accumulated_;
}

double SecondaryConsensus::increment(std::span<const ConsensusInput> neighbors, double local_current,
                                     double local_rating)
{
    double sum = 0.0;
    for (const auto& n : neighbors) {
        sum += n.weight * normalized_difference(n, local_current, local_rating);
    }
    return sum;
}

double SecondaryConsensus::step(std::span<const ConsensusInput> neighbors, double local_current,
                                double local_rating)
{
    alpha_ += increment(neighbors, local_current, local_rating);
    return alpha_;
}

double sharing_error(std::span<const ConsensusInput> neighbors, double local_current, double local_rating)
{
    double sum = 0.0;
    for (const auto& n : neighbors) {
        sum += std::abs(normalized_difference(n, local_current, local_rating));
    }
    return sum;
}

}  // namespace dcmg
