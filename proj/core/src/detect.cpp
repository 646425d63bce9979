#include "dcmg/detect.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcmg {

namespace {

std::string prefix(const std::string& link)
{
    return link.empty() ? std::string("uio: ") : "uio " + link + ": ";
}

}  // namespace

BoundConstants compute_bound_constants(const Mat2& f, int horizon)
{
    const double rho = spectral_radius(f);
    if (!(rho < 1.0)) {
        std::ostringstream os;
        os << "spectral radius of F is " << rho << ", must be below 1";
        throw SynthesisError(os.str());
    }
    BoundConstants c;
    c.sigma = 0.5 * (1.0 + rho);
    Mat2 power = Mat2::Identity();
    double scale = 1.0;
    double nu = 1.0;
    for (int k = 0; k <= horizon; ++k) {
        nu = std::max(nu, norm_inf(power) / scale);
        power = (power * f).eval();
        scale *= c.sigma;
    }
    c.nu = nu;
    return c;
}

UioGains synthesize_uio(const DiscreteModel& model, const UioPoles& poles, const std::string& link)
{
    const double mm = model.m.squaredNorm();
    if (!(mm > 0.0) || !std::isfinite(mm)) {
        throw SynthesisError(prefix(link) + "unknown-input direction m_d is zero");
    }
    if (!(std::abs(poles.first) < 1.0) || !(std::abs(poles.second) < 1.0)) {
        throw SynthesisError(prefix(link) + "observer poles must lie inside the unit circle");
    }

    UioGains g;
    g.model = model;
    g.h = model.m * model.m.transpose() / mm;
    g.t = Mat2::Identity() - g.h;
    g.f = Vec2(poles.first, poles.second).asDiagonal();
    g.k1 = g.t * model.a - g.f;
    g.k2 = g.f * g.h;
    g.k_hat = g.k1 + g.k2;
    g.tb = g.t * model.b;

    const double leak = (g.t * model.m).cwiseAbs().maxCoeff();
    if (leak > 1e-12 * std::max(1.0, model.m.cwiseAbs().maxCoeff())) {
        throw SynthesisError(prefix(link) + "T m_d does not vanish");
    }
    try {
        const BoundConstants c = compute_bound_constants(g.f);
        g.nu = c.nu;
        g.sigma = c.sigma;
    } catch (const SynthesisError& e) {
        throw SynthesisError(prefix(link) + e.what());
    }
    return g;
}

void uio_init(UioState& state, const UioGains& gains, const Vec2& y)
{
    state.z = gains.t * y;
    state.r.setZero();
    state.last_y = y;
    state.initialized = true;
}

const Vec2& uio_step(UioState& state, const UioGains& gains, double u, const Vec2& y_next)
{
    state.z = gains.f * state.z + gains.tb * u + gains.k_hat * state.last_y;
    state.r = y_next - (state.z + gains.h * y_next);
    state.last_y = y_next;
    return state.r;
}

ResidualBound::ResidualBound(const UioGains& gains, const NoiseBounds& noise)
    : initial_(abs(gains.t) * noise.measurement),
      drive_(abs(gains.t) * noise.process + abs(gains.k_hat) * noise.measurement),
      nu_(gains.nu),
      sigma_(gains.sigma)
{
}

Vec2 ResidualBound::limit() const
{
    return initial_ + nu_ * drive_ / (1.0 - sigma_);
}

void ResidualBound::advance()
{
    sum_ = sigma_ * sum_ + drive_;
    power_ *= sigma_;
    ++k_;
}

void ResidualBound::restart()
{
    sum_.setZero();
    power_ = 1.0;
    k_ = 0;
}

Vec2 residual_bound_at(const UioGains& gains, const NoiseBounds& noise, long k)
{
    ResidualBound b(gains, noise);
    for (long i = 0; i < k; ++i) {
        b.advance();
    }
    return b.value();
}

bool AlarmLatch::update(const Vec2& residual, const Vec2& bound, long k)
{
    exceeded_ = (residual.cwiseAbs().array() > bound.array() + floor_).any();
    if (grace_ > 0) {
        --grace_;
        return alarm_;
    }
    if (exceeded_) {
        if (!alarm_) {
            alarm_ = true;
            alarm_step_ = k;
            if (!first_alarm_) {
                first_alarm_ = k;
            }
        }
        streak_ = 0;
    } else if (alarm_) {
        if (streak_ == hold_) {
            alarm_ = false;
            streak_ = 0;
            alarm_step_.reset();
        } else {
            ++streak_;
        }
    }
    return alarm_;
}

}  // namespace dcmg
