#pragma once

#include <vector>

#include "ecgres/events.hpp"
#include "ecgres/types.hpp"

namespace ecgres {

struct EncoderConfig {
    double delta_mv = 0.0;     // threshold step per channel
    double refractory_s = 0.0; // min spacing between events of one (channel, polarity)
};

// Level-crossing encoding: per channel, a reference level starts at the
// first sample and moves by +-delta whenever the linearly interpolated
// signal reaches reference +- delta; each move emits an up/down event at
// the interpolated crossing time. Crossings that fall inside the refractory
// window of their (channel, polarity) are emitted at its expiry; the
// reference only moves on emission.
EventTrain encode(const SampledSignal& signal, const EncoderConfig& cfg);

// Staircase reconstruction: per channel, initial level plus
// delta * (#up - #down) over events with time <= sample time.
SampledSignal decode(const EventTrain& train, int n_channels, double delta_mv,
                     const std::vector<double>& initial_mv, double fs);

struct CalibrationResult {
    EncoderConfig cfg;
    double achieved_rate = 0.0;  // events/s/channel, both polarities
};

// Bisects delta until the mean event rate (events/s/channel, up and down
// combined) is within tol of target_rate.
CalibrationResult calibrate_delta(const SampledSignal& signal, double target_rate,
                                  double tol = 0.05, int max_iter = 80);

} // namespace ecgres
