#include "ecgres/wfdb.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <sstream>

#include "ecgres/errors.hpp"
#include "ecgres/util.hpp"

namespace fs = std::filesystem;

namespace ecgres::wfdb {

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw Error(ErrorCode::Format, "MalformedHeader: " + what);
}

[[noreturn]] void unsupported(const std::string& what) {
    throw Error(ErrorCode::Format, "UnsupportedFormat: " + what);
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok)
        tokens.push_back(tok);
    return tokens;
}

long parse_int(const std::string& tok, const std::string& field) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr == tok.data())
        malformed("bad integer in " + field + ": '" + tok + "'");
    return value;
}

// Leading numeric part of a token, stopping at any suffix character.
double parse_double_prefix(const std::string& tok, size_t* end_out = nullptr) {
    size_t end = 0;
    double value = std::stod(tok, &end);
    if (end_out)
        *end_out = end;
    return value;
}

} // namespace

bool is_beat_code(int code) {
    // QRS-marking annotation type codes of the MIT format.
    switch (code) {
    case 1: case 2: case 3: case 4: case 5: case 6: case 7:
    case 8: case 9: case 10: case 11: case 12: case 13:
    case 25: case 30: case 34: case 35: case 38: case 41:
        return true;
    default:
        return false;
    }
}

BeatLabel label_from_code(int code) {
    switch (code) {
    case kCodeNormal: return BeatLabel::Normal;
    case kCodeLbbb: return BeatLabel::Lbbb;
    case kCodeRbbb: return BeatLabel::Rbbb;
    case kCodePvc: return BeatLabel::Pvc;
    case kCodeApb: return BeatLabel::Apb;
    case kCodePaced: return BeatLabel::Paced;
    default: return BeatLabel::Other;
    }
}

RecordHeader parse_header(std::string_view text) {
    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        if (!cur.empty())
            lines.push_back(cur);
    }

    RecordHeader header;
    size_t idx = 0;
    // Record line: first non-comment, non-blank line.
    while (idx < lines.size()) {
        const std::string& line = lines[idx];
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') {
            ++idx;
            continue;
        }
        break;
    }
    if (idx >= lines.size())
        malformed("missing record line");

    auto record_tokens = tokenize(lines[idx++]);
    if (record_tokens.size() < 2)
        malformed("record line needs at least name and signal count");
    header.record_name = record_tokens[0];
    if (header.record_name.find('/') != std::string::npos)
        unsupported("multi-segment record");
    long n_channels = parse_int(record_tokens[1], "signal count");
    if (n_channels <= 0)
        malformed("record declares no signals");
    header.n_channels = static_cast<int>(n_channels);
    header.fs = 250.0;  // WFDB default when unstated
    if (record_tokens.size() >= 3)
        header.fs = parse_double_prefix(record_tokens[2]);
    if (header.fs <= 0)
        malformed("non-positive sampling rate");
    if (record_tokens.size() >= 4)
        header.n_samples = static_cast<size_t>(parse_int(record_tokens[3], "sample count"));

    for (int ch = 0; ch < header.n_channels; ++ch) {
        // Signal lines follow immediately; comments may be interleaved.
        while (idx < lines.size()) {
            size_t start = lines[idx].find_first_not_of(" \t");
            if (start == std::string::npos || lines[idx][start] == '#')
                ++idx;
            else
                break;
        }
        if (idx >= lines.size())
            malformed("missing signal line for channel " + std::to_string(ch));
        auto tokens = tokenize(lines[idx++]);
        if (tokens.size() < 2)
            malformed("signal line needs file name and format");

        ChannelSpec spec;
        spec.file = tokens[0];

        // Format token: digits, then optional xN (samples per frame),
        // :K (skew), +M (byte offset).
        {
            const std::string& tok = tokens[1];
            size_t end = 0;
            long fmt = std::stol(tok, &end);
            spec.format = static_cast<int>(fmt);
            while (end < tok.size()) {
                char tag = tok[end++];
                size_t used = 0;
                long arg = std::stol(tok.substr(end), &used);
                end += used;
                if (tag == 'x' && arg != 1)
                    unsupported("samples-per-frame != 1");
                if (tag == ':' && arg != 0)
                    unsupported("skewed signals");
                if (tag == '+' && arg != 0)
                    unsupported("byte offset into signal file");
            }
            if (spec.format != 212)
                unsupported("signal format " + std::to_string(spec.format));
        }

        bool baseline_given = false;
        if (tokens.size() >= 3) {
            const std::string& tok = tokens[2];
            size_t end = 0;
            spec.gain = parse_double_prefix(tok, &end);
            if (end < tok.size() && tok[end] == '(') {
                size_t used = 0;
                spec.baseline = static_cast<int>(std::stol(tok.substr(end + 1), &used));
                baseline_given = true;
            }
            // '/units' suffix ignored
        }
        if (spec.gain == 0.0)
            spec.gain = 200.0;  // WFDB default gain
        if (spec.gain < 0.0)
            malformed("negative gain");

        if (tokens.size() >= 4)
            spec.adc_res = static_cast<int>(parse_int(tokens[3], "adc resolution"));
        if (tokens.size() >= 5)
            spec.adc_zero = static_cast<int>(parse_int(tokens[4], "adc zero"));
        if (!baseline_given)
            spec.baseline = spec.adc_zero;
        spec.init_value = spec.adc_zero;
        if (tokens.size() >= 6)
            spec.init_value = static_cast<int>(parse_int(tokens[5], "initial value"));
        if (tokens.size() >= 7) {
            spec.checksum = static_cast<int>(parse_int(tokens[6], "checksum"));
            spec.has_checksum = true;
        }
        // tokens[7] is the block size; anything after is the description.
        if (tokens.size() >= 9) {
            std::string desc = tokens[8];
            for (size_t i = 9; i < tokens.size(); ++i)
                desc += " " + tokens[i];
            spec.description = desc;
        }
        header.channels.push_back(std::move(spec));
    }
    return header;
}

std::vector<int16_t> unpack_212(std::span<const uint8_t> bytes, size_t n_values) {
    size_t need = (n_values * 3 + 1) / 2;
    if (bytes.size() < need)
        throw Error(ErrorCode::Format,
                    "TruncatedSignal: need " + std::to_string(need) + " bytes, have " +
                        std::to_string(bytes.size()));
    std::vector<int16_t> out(n_values);
    size_t pos = 0;
    for (size_t i = 0; i + 1 < n_values; i += 2) {
        uint8_t b0 = bytes[pos], b1 = bytes[pos + 1], b2 = bytes[pos + 2];
        pos += 3;
        int v0 = ((b1 & 0x0F) << 8) | b0;
        int v1 = ((b1 & 0xF0) << 4) | b2;
        if (v0 & 0x800)
            v0 -= 4096;
        if (v1 & 0x800)
            v1 -= 4096;
        out[i] = static_cast<int16_t>(v0);
        out[i + 1] = static_cast<int16_t>(v1);
    }
    if (n_values % 2 == 1) {
        uint8_t b0 = bytes[pos], b1 = bytes[pos + 1];
        int v0 = ((b1 & 0x0F) << 8) | b0;
        if (v0 & 0x800)
            v0 -= 4096;
        out[n_values - 1] = static_cast<int16_t>(v0);
    }
    return out;
}

SampledSignal parse_signal_212(std::span<const uint8_t> bytes, const RecordHeader& header) {
    if (header.n_channels <= 0 || header.channels.size() != static_cast<size_t>(header.n_channels))
        throw Error(ErrorCode::Format, "header/format mismatch: incomplete channel specs");
    for (const auto& spec : header.channels)
        if (spec.format != 212)
            throw Error(ErrorCode::Format, "UnsupportedFormat: signal format " +
                                               std::to_string(spec.format));

    size_t n_samples = header.n_samples;
    if (n_samples == 0) {
        // Unstated length: take everything in the file.
        n_samples = bytes.size() * 2 / 3 / header.n_channels;
    }
    auto digital = unpack_212(bytes, n_samples * header.n_channels);

    SampledSignal signal(n_samples, header.n_channels, header.fs);
    for (int ch = 0; ch < header.n_channels; ++ch) {
        const auto& spec = header.channels[ch];
        double inv_gain = 1.0 / spec.gain;
        for (size_t i = 0; i < n_samples; ++i)
            signal.at(i, ch) = (digital[i * header.n_channels + ch] - spec.baseline) * inv_gain;
    }
    return signal;
}

std::vector<BeatAnnotation> parse_annotations(std::span<const uint8_t> bytes) {
    auto fail = [](const std::string& what) -> void {
        throw Error(ErrorCode::Format, "MalformedAnnotation: " + what);
    };

    std::vector<BeatAnnotation> out;
    size_t pos = 0;
    long long time = 0;
    long long last_time = -1;
    bool terminated = false;

    auto read_word = [&](const char* what) -> uint16_t {
        if (pos + 2 > bytes.size())
            fail(std::string("truncated ") + what);
        uint16_t w = static_cast<uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
        pos += 2;
        return w;
    };

    while (pos < bytes.size()) {
        uint16_t word = read_word("annotation word");
        if (word == 0) {
            terminated = true;
            break;
        }
        int code = word >> 10;
        long delta = word & 0x3FF;
        switch (code) {
        case 59: {  // SKIP: 4-byte interval, high word first, words little-endian
            if (delta != 0)
                fail("SKIP with nonzero time field");
            uint16_t hi = read_word("SKIP interval");
            uint16_t lo = read_word("SKIP interval");
            int32_t skip = static_cast<int32_t>((static_cast<uint32_t>(hi) << 16) | lo);
            time += skip;
            break;
        }
        case 60:  // NUM
        case 61:  // SUB
        case 62:  // CHN
            break;  // field modifiers for the previous annotation; no time change
        case 63: {  // AUX: delta = byte count, padded to even length
            size_t n = static_cast<size_t>(delta);
            n += n & 1;
            if (pos + n > bytes.size())
                fail("truncated AUX data");
            pos += n;
            break;
        }
        case 0:
            fail("NOTQRS annotation with nonzero time");
            break;
        default: {
            time += delta;
            if (time < 0)
                fail("cumulative time below zero");
            if (time <= last_time && is_beat_code(code))
                fail("non-increasing beat time");
            if (time < last_time)
                fail("decreasing annotation time");
            if (is_beat_code(code)) {
                out.push_back({static_cast<size_t>(time), label_from_code(code)});
                last_time = time;
            } else {
                last_time = std::max(last_time, time);
            }
            break;
        }
        }
    }
    if (!terminated)
        fail("missing terminator");
    return out;
}

Record load_record(const std::string& dir, const std::string& name) {
    fs::path base = fs::path(dir) / name;
    Record record;
    record.header = parse_header(read_text_file(base.string() + ".hea"));

    // All MIT-BIH channels live in one .dat per record.
    for (const auto& spec : record.header.channels)
        if (spec.file != record.header.channels[0].file)
            throw Error(ErrorCode::Format, "UnsupportedFormat: multi-file record");

    fs::path dat = fs::path(dir) / record.header.channels[0].file;
    auto signal_bytes = read_binary_file(dat.string());
    record.signal = parse_signal_212(signal_bytes, record.header);

    auto ann_bytes = read_binary_file(base.string() + ".atr");
    record.beats = parse_annotations(ann_bytes);
    for (const auto& beat : record.beats)
        if (beat.sample_index >= record.signal.n_samples())
            throw Error(ErrorCode::Format,
                        "MalformedAnnotation: beat index past end of record " + name);
    return record;
}

std::vector<std::string> list_records(const std::string& dir) {
    std::vector<std::string> names;
    fs::path records_file = fs::path(dir) / "RECORDS";
    if (fs::exists(records_file)) {
        std::istringstream in(read_text_file(records_file.string()));
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
                line.pop_back();
            if (!line.empty())
                names.push_back(line);
        }
        return names;
    }
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".hea")
            names.push_back(entry.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

} // namespace ecgres::wfdb
