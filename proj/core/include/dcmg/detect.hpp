#pragma once

#include "dcmg/linalg.hpp"
#include "dcmg/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace dcmg {

class SynthesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct UioPoles {
    double first = 0.3;
    double second = 0.35;

    bool operator==(const UioPoles&) const = default;
};

struct UioGains {
    Mat2 f = Mat2::Zero();
    Mat2 t = Mat2::Identity();
    Mat2 h = Mat2::Zero();
    Mat2 k1 = Mat2::Zero();
    Mat2 k2 = Mat2::Zero();
    Mat2 k_hat = Mat2::Zero();
    Vec2 tb = Vec2::Zero();  // T b_d, reused every step
    double nu = 1.0;
    double sigma = 0.5;
    DiscreteModel model;
};

struct BoundConstants {
    double nu = 1.0;
    double sigma = 0.5;
};

/// Throws SynthesisError when the spectral radius of F is not below one.
BoundConstants compute_bound_constants(const Mat2& f, int horizon = 1000);

/// Builds the observer for one incoming link from the sender's discrete model.
/// `link` only decorates error messages.
UioGains synthesize_uio(const DiscreteModel& model, const UioPoles& poles = {},
                        const std::string& link = {});

/// Observer state for one directed link. The received output of the previous
/// step is kept so that the update can be driven by the newest sample only.
struct UioState {
    Vec2 z = Vec2::Zero();
    Vec2 r = Vec2::Zero();
    Vec2 last_y = Vec2::Zero();
    bool initialized = false;
};

/// z = T y, hence x_hat = y and r = 0.
void uio_init(UioState& state, const UioGains& gains, const Vec2& y);

/// z+ = F z + T b u + K y; r+ = y+ - (z+ + H y+), with y the stored sample of
/// the previous call and u the command applied between the two samples.
const Vec2& uio_step(UioState& state, const UioGains& gains, double u, const Vec2& y_next);

/// Time-varying residual threshold
/// nu sigma^k |T| rho + |T| rho + nu sum_{l<k} sigma^{k-1-l} (|T| omega + |K| rho),
/// evaluated recursively.
class ResidualBound {
public:
    ResidualBound() = default;
    ResidualBound(const UioGains& gains, const NoiseBounds& noise);

    Vec2 value() const { return nu_ * power_ * initial_ + initial_ + nu_ * sum_; }
    Vec2 limit() const;
    void advance();
    /// Restarts the transient at k = 0.
    void restart();
    long step() const { return k_; }

private:
    Vec2 initial_ = Vec2::Zero();
    Vec2 drive_ = Vec2::Zero();
    Vec2 sum_ = Vec2::Zero();
    double nu_ = 1.0;
    double sigma_ = 0.5;
    double power_ = 1.0;
    long k_ = 0;
};

/// r_bar(k) evaluated from scratch (used by tests and reports).
Vec2 residual_bound_at(const UioGains& gains, const NoiseBounds& noise, long k);

/// Latched alarm. Raised on any componentwise exceedance, dropped only after
/// `hold_steps` consecutive in-bound steps have been seen while raised.
class AlarmLatch {
public:
    explicit AlarmLatch(int hold_steps = 10, double floor = 1e-9) : hold_(hold_steps), floor_(floor) {}

    /// Returns the alarm flag after processing step k.
    bool update(const Vec2& residual, const Vec2& bound, long k);

    /// Keeps the flag frozen for the next `steps` updates.
    void suppress(int steps) { grace_ = steps; }

    bool alarm() const { return alarm_; }
    int normal_streak() const { return streak_; }
    std::optional<long> alarm_step() const { return alarm_step_; }
    std::optional<long> first_alarm_step() const { return first_alarm_; }
    bool in_grace() const { return grace_ > 0; }
    bool exceeded() const { return exceeded_; }

private:
    int hold_;
    double floor_;
    bool alarm_ = false;
    bool exceeded_ = false;
    int streak_ = 0;
    int grace_ = 0;
    std::optional<long> alarm_step_;
    std::optional<long> first_alarm_;
};

}  // namespace dcmg
