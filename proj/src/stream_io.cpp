#include "ecgres/stream_io.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

#include "ecgres/errors.hpp"
#include "ecgres/util.hpp"

namespace ecgres {

namespace {

constexpr char kMagic[4] = {'E', 'C', 'G', 'S'};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<uint8_t>& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

uint32_t get_u32(const uint8_t* p) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<uint32_t>(p[i]) << (8 * i);
    return v;
}

uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<uint64_t>(p[i]) << (8 * i);
    return v;
}

double get_f64(const uint8_t* p) {
    uint64_t bits = get_u64(p);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

void write_signal(const std::string& path, const SampledSignal& signal) {
    std::vector<uint8_t> out;
    out.reserve(24 + signal.data.size() * 8);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, 1);
    put_u32(out, static_cast<uint32_t>(signal.n_channels));
    put_f64(out, signal.fs);
    put_u64(out, signal.n_samples());
    for (double v : signal.data)
        put_f64(out, v);
    write_file_atomic(path, out);
}

SampledSignal read_signal(const std::string& path) {
    auto raw = read_binary_file(path);
    if (raw.size() < 28 || std::memcmp(raw.data(), kMagic, 4) != 0)
        throw Error(ErrorCode::Format, "not a stream signal file: " + path);
    uint32_t version = get_u32(raw.data() + 4);
    if (version != 1)
        throw Error(ErrorCode::Format, "unknown signal file version");
    SampledSignal signal;
    signal.n_channels = static_cast<int>(get_u32(raw.data() + 8));
    signal.fs = get_f64(raw.data() + 12);
    uint64_t n_samples = get_u64(raw.data() + 20);
    size_t need = 28 + n_samples * signal.n_channels * 8;
    if (raw.size() < need)
        throw Error(ErrorCode::Format, "truncated signal file: " + path);
    signal.data.resize(n_samples * signal.n_channels);
    for (size_t i = 0; i < signal.data.size(); ++i)
        signal.data[i] = get_f64(raw.data() + 28 + i * 8);
    return signal;
}

void write_intervals(const std::string& path, const std::vector<Interval>& intervals) {
    std::string out = "start_s,end_s,label,unit_kind,unit_id\n";
    char line[128];
    for (const auto& iv : intervals) {
        std::snprintf(line, sizeof(line), "%.9f,%.9f,%s,%s,%u\n", iv.start_s, iv.end_s,
                      label_name(iv.label), iv.kind == UnitKind::Beat ? "beat" : "segment",
                      iv.unit_id);
        out += line;
    }
    write_text_file_atomic(path, out);
}

std::vector<Interval> read_intervals(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("start_s,", 0) != 0)
        throw Error(ErrorCode::Format, "not an interval file: " + path);
    std::vector<Interval> intervals;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string field;
        Interval iv;
        std::getline(row, field, ',');
        iv.start_s = std::stod(field);
        std::getline(row, field, ',');
        iv.end_s = std::stod(field);
        std::getline(row, field, ',');
        iv.label = label_from_name(field);
        std::getline(row, field, ',');
        if (field == "beat")
            iv.kind = UnitKind::Beat;
        else if (field == "segment")
            iv.kind = UnitKind::Segment;
        else
            throw Error(ErrorCode::Format, "bad unit kind: " + field);
        std::getline(row, field, ',');
        iv.unit_id = static_cast<uint32_t>(std::stoul(field));
        intervals.push_back(iv);
    }
    return intervals;
}

} // namespace ecgres
