#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ecgres {

// One timestamped event. For encoder output, source is the input line id
// (2*channel + 0 for up, +1 for down) and meta carries the polarity
// (1 = up, 0 = down). For simulator output, source is the neuron id and
// meta is 0.
struct Event {
    double time_s = 0.0;
    uint32_t source = 0;
    uint8_t meta = 0;
};

struct EventTrain {
    std::vector<Event> events;
    double duration_s = 0.0;
};

inline uint32_t input_line_id(int channel, bool up) {
    return static_cast<uint32_t>(2 * channel + (up ? 0 : 1));
}

// Binary event file: packed little-endian records of
// (time_s: f64, source: u32, meta: u8), 13 bytes each, with a JSON sidecar
// at <path>.json carrying counts, duration and the source map.
class EventWriter {
public:
    EventWriter(const std::string& path, std::string kind);
    ~EventWriter();
    EventWriter(const EventWriter&) = delete;
    EventWriter& operator=(const EventWriter&) = delete;

    void write(const Event& ev);
    void write(const std::vector<Event>& evs);
    // Extra sidecar fields (already-serialized JSON object text).
    void set_sidecar_extra(const std::string& json_object_text);
    // Writes the sidecar and closes the stream. Called by the destructor
    // if not invoked explicitly.
    void finish(double duration_s);

private:
    struct Impl;
    Impl* impl_;
};

class EventReader {
public:
    explicit EventReader(const std::string& path);
    ~EventReader();
    EventReader(const EventReader&) = delete;
    EventReader& operator=(const EventReader&) = delete;

    // Fills up to max_events; returns number read (0 at end of stream).
    size_t read(std::vector<Event>& out, size_t max_events);
    double duration_s() const;  // from sidecar
    uint64_t n_events() const;  // from sidecar
    std::string sidecar_text() const;

private:
    struct Impl;
    Impl* impl_;
};

void write_event_file(const std::string& path, const EventTrain& train,
                      const std::string& kind,
                      const std::string& sidecar_extra = "");
EventTrain read_event_file(const std::string& path);

} // namespace ecgres
