#include "ecgres/events.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ecgres/errors.hpp"
#include "ecgres/util.hpp"

using nlohmann::json;

namespace ecgres {

namespace {

constexpr size_t kRecordBytes = 13;  // f64 time + u32 source + u8 meta, packed

void pack_event(const Event& ev, uint8_t* out) {
    uint64_t t;
    std::memcpy(&t, &ev.time_s, 8);
    for (int i = 0; i < 8; ++i)
        out[i] = static_cast<uint8_t>(t >> (8 * i));
    for (int i = 0; i < 4; ++i)
        out[8 + i] = static_cast<uint8_t>(ev.source >> (8 * i));
    out[12] = ev.meta;
}

Event unpack_event(const uint8_t* in) {
    Event ev;
    uint64_t t = 0;
    for (int i = 0; i < 8; ++i)
        t |= static_cast<uint64_t>(in[i]) << (8 * i);
    std::memcpy(&ev.time_s, &t, 8);
    ev.source = 0;
    for (int i = 0; i < 4; ++i)
        ev.source |= static_cast<uint32_t>(in[8 + i]) << (8 * i);
    ev.meta = in[12];
    return ev;
}

} // namespace

struct EventWriter::Impl {
    std::string path;
    std::string tmp_path;
    std::string kind;
    std::string extra;
    std::ofstream out;
    uint64_t count = 0;
    double last_time = 0.0;
    bool finished = false;
};

EventWriter::EventWriter(const std::string& path, std::string kind) : impl_(new Impl) {
    impl_->path = path;
    impl_->tmp_path = path + ".tmp";
    impl_->kind = std::move(kind);
    std::filesystem::path p(path);
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    impl_->out.open(impl_->tmp_path, std::ios::binary | std::ios::trunc);
    if (!impl_->out)
        throw Error(ErrorCode::Io, "cannot create event file: " + path);
}

EventWriter::~EventWriter() {
    if (!impl_->finished) {
        try {
            finish(impl_->last_time);
        } catch (...) {
        }
    }
    delete impl_;
}

void EventWriter::write(const Event& ev) {
    uint8_t buf[kRecordBytes];
    pack_event(ev, buf);
    impl_->out.write(reinterpret_cast<const char*>(buf), kRecordBytes);
    impl_->count++;
    impl_->last_time = ev.time_s;
}

void EventWriter::write(const std::vector<Event>& evs) {
    for (const auto& ev : evs)
        write(ev);
}

void EventWriter::set_sidecar_extra(const std::string& json_object_text) {
    impl_->extra = json_object_text;
}

void EventWriter::finish(double duration_s) {
    if (impl_->finished)
        return;
    impl_->out.close();
    if (!impl_->out)
        throw Error(ErrorCode::Io, "write failed: " + impl_->path);
    std::filesystem::rename(impl_->tmp_path, impl_->path);

    json side;
    side["version"] = 1;
    side["kind"] = impl_->kind;
    side["n_events"] = impl_->count;
    side["duration_s"] = duration_s;
    if (!impl_->extra.empty())
        side["extra"] = json::parse(impl_->extra);
    write_text_file_atomic(impl_->path + ".json", side.dump(2) + "\n");
    impl_->finished = true;
}

struct EventReader::Impl {
    std::ifstream in;
    double duration = 0.0;
    uint64_t n_events = 0;
    std::string sidecar;
};

EventReader::EventReader(const std::string& path) : impl_(new Impl) {
    impl_->in.open(path, std::ios::binary);
    if (!impl_->in)
        throw Error(ErrorCode::Io, "cannot open event file: " + path);
    std::string side_path = path + ".json";
    if (file_exists(side_path)) {
        impl_->sidecar = read_text_file(side_path);
        json side = json::parse(impl_->sidecar);
        impl_->duration = side.value("duration_s", 0.0);
        impl_->n_events = side.value("n_events", uint64_t{0});
    }
}

EventReader::~EventReader() {
    delete impl_;
}

size_t EventReader::read(std::vector<Event>& out, size_t max_events) {
    out.clear();
    std::vector<uint8_t> buf(max_events * kRecordBytes);
    impl_->in.read(reinterpret_cast<char*>(buf.data()),
                   static_cast<std::streamsize>(buf.size()));
    size_t got = static_cast<size_t>(impl_->in.gcount());
    if (got % kRecordBytes != 0)
        throw Error(ErrorCode::Format, "truncated event file record");
    size_t n = got / kRecordBytes;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i)
        out.push_back(unpack_event(buf.data() + i * kRecordBytes));
    return n;
}

double EventReader::duration_s() const {
    return impl_->duration;
}

uint64_t EventReader::n_events() const {
    return impl_->n_events;
}

std::string EventReader::sidecar_text() const {
    return impl_->sidecar;
}

void write_event_file(const std::string& path, const EventTrain& train,
                      const std::string& kind, const std::string& sidecar_extra) {
    EventWriter writer(path, kind);
    if (!sidecar_extra.empty())
        writer.set_sidecar_extra(sidecar_extra);
    writer.write(train.events);
    writer.finish(train.duration_s);
}

EventTrain read_event_file(const std::string& path) {
    EventReader reader(path);
    EventTrain train;
    train.duration_s = reader.duration_s();
    std::vector<Event> chunk;
    while (reader.read(chunk, 1 << 16) > 0)
        train.events.insert(train.events.end(), chunk.begin(), chunk.end());
    return train;
}

} // namespace ecgres
