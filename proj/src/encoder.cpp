#include "ecgres/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecgres/errors.hpp"

namespace ecgres {

namespace {

void encode_channel(const SampledSignal& signal, int channel, const EncoderConfig& cfg,
                    std::vector<Event>& out) {
    const size_t n = signal.n_samples();
    if (n < 2)
        return;
    const double dt = 1.0 / signal.fs;
    const double delta = cfg.delta_mv;
    const double refr = cfg.refractory_s;

    double ref = signal.at(0, channel);
    double last_up = -std::numeric_limits<double>::infinity();
    double last_down = -std::numeric_limits<double>::infinity();

    for (size_t k = 0; k + 1 < n; ++k) {
        const double v0 = signal.at(k, channel);
        const double v1 = signal.at(k + 1, channel);
        const double t0 = static_cast<double>(k) * dt;
        const double t1 = t0 + dt;
        if (v1 == v0)
            continue;
        const bool up = v1 > v0;
        double& last = up ? last_up : last_down;
        const double sign = up ? 1.0 : -1.0;

        while (sign * (v1 - (ref + sign * delta)) >= 0.0) {
            const double level = ref + sign * delta;
            double t_star = t0 + (level - v0) / (v1 - v0) * dt;
            if (t_star < last + refr) {
                // blocked; the signal is past the level when the window ends
                t_star = last + refr;
                if (t_star > t1)
                    break;
            }
            out.push_back({t_star, input_line_id(channel, up), static_cast<uint8_t>(up ? 1 : 0)});
            ref = level;
            last = t_star;
        }
    }
}

} // namespace

EventTrain encode(const SampledSignal& signal, const EncoderConfig& cfg) {
    if (!(cfg.delta_mv > 0.0))
        throw Error(ErrorCode::Config, "InvalidConfig: delta must be positive");
    if (cfg.refractory_s < 0.0)
        throw Error(ErrorCode::Config, "InvalidConfig: negative refractory");
    for (double v : signal.data)
        if (!std::isfinite(v))
            throw Error(ErrorCode::Data, "non-finite sample in encoder input");

    EventTrain train;
    train.duration_s = signal.duration_s();
    for (int ch = 0; ch < signal.n_channels; ++ch)
        encode_channel(signal, ch, cfg, train.events);
    std::stable_sort(train.events.begin(), train.events.end(),
                     [](const Event& a, const Event& b) {
                         if (a.time_s != b.time_s)
                             return a.time_s < b.time_s;
                         return a.source < b.source;
                     });
    return train;
}

SampledSignal decode(const EventTrain& train, int n_channels, double delta_mv,
                     const std::vector<double>& initial_mv, double fs) {
    size_t n_samples = static_cast<size_t>(std::ceil(train.duration_s * fs)) + 1;
    SampledSignal out(n_samples, n_channels, fs);
    std::vector<double> level(initial_mv);
    level.resize(n_channels, 0.0);

    size_t next_event = 0;
    for (size_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / fs;
        while (next_event < train.events.size() && train.events[next_event].time_s <= t) {
            const Event& ev = train.events[next_event++];
            int ch = static_cast<int>(ev.source / 2);
            if (ch < n_channels)
                level[ch] += (ev.meta ? delta_mv : -delta_mv);
        }
        for (int ch = 0; ch < n_channels; ++ch)
            out.at(i, ch) = level[ch];
    }
    return out;
}

CalibrationResult calibrate_delta(const SampledSignal& signal, double target_rate,
                                  double tol, int max_iter) {
    if (!(target_rate > 0.0))
        throw Error(ErrorCode::Config, "InvalidConfig: target rate must be positive");
    double lo_val = std::numeric_limits<double>::infinity();
    double hi_val = -lo_val;
    for (double v : signal.data) {
        lo_val = std::min(lo_val, v);
        hi_val = std::max(hi_val, v);
    }
    const double span = hi_val - lo_val;
    if (!(span > 0.0))
        throw Error(ErrorCode::Numeric, "NonMonotone: constant signal, no delta reaches target");

    const double duration = signal.duration_s();
    auto rate_at = [&](double delta) {
        EncoderConfig cfg{delta, 0.0};
        EventTrain train = encode(signal, cfg);
        return static_cast<double>(train.events.size()) / duration / signal.n_channels;
    };

    // Rate decreases with delta; bracket the target then bisect in log space.
    double lo = span * 1e-9;  // high rate
    double hi = span;         // low rate
    double rate_lo = rate_at(lo);
    if (rate_lo < target_rate * (1.0 - tol))
        throw Error(ErrorCode::Numeric, "NonMonotone: signal variation too small for target rate");

    double best_delta = hi;
    double best_rate = rate_at(hi);
    for (int i = 0; i < max_iter; ++i) {
        double mid = std::sqrt(lo * hi);
        double r = rate_at(mid);
        if (std::abs(r - target_rate) < std::abs(best_rate - target_rate)) {
            best_delta = mid;
            best_rate = r;
        }
        if (std::abs(r - target_rate) <= tol * target_rate)
            break;
        if (r > target_rate)
            lo = mid;
        else
            hi = mid;
    }
    if (std::abs(best_rate - target_rate) > tol * target_rate)
        throw Error(ErrorCode::Numeric, "calibration did not converge to target rate");
    return {EncoderConfig{best_delta, 0.0}, best_rate};
}

} // namespace ecgres
