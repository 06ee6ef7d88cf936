#include "ecgres/wfdb_write.hpp"

#include <cstdio>
#include <filesystem>

#include "ecgres/errors.hpp"
#include "ecgres/util.hpp"

namespace fs = std::filesystem;

namespace ecgres::wfdb {

std::string format_header(const RecordHeader& header) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%s %d %g %zu\n", header.record_name.c_str(),
                  header.n_channels, header.fs, header.n_samples);
    out += line;
    for (const auto& spec : header.channels) {
        std::snprintf(line, sizeof(line), "%s %d %g(%d)/mV %d %d %d %d 0 %s\n",
                      spec.file.c_str(), spec.format, spec.gain, spec.baseline,
                      spec.adc_res, spec.adc_zero, spec.init_value, spec.checksum,
                      spec.description.c_str());
        out += line;
    }
    return out;
}

std::vector<uint8_t> pack_212(const std::vector<int16_t>& samples) {
    std::vector<uint8_t> out;
    out.reserve((samples.size() * 3 + 1) / 2);
    size_t i = 0;
    for (; i + 1 < samples.size(); i += 2) {
        int v0 = samples[i] & 0xFFF;
        int v1 = samples[i + 1] & 0xFFF;
        out.push_back(static_cast<uint8_t>(v0 & 0xFF));
        out.push_back(static_cast<uint8_t>(((v0 >> 8) & 0x0F) | ((v1 >> 8) << 4)));
        out.push_back(static_cast<uint8_t>(v1 & 0xFF));
    }
    if (i < samples.size()) {
        int v0 = samples[i] & 0xFFF;
        out.push_back(static_cast<uint8_t>(v0 & 0xFF));
        out.push_back(static_cast<uint8_t>((v0 >> 8) & 0x0F));
        out.push_back(0);
    }
    return out;
}

std::vector<uint8_t> format_annotations(const std::vector<AnnotationEntry>& entries) {
    std::vector<uint8_t> out;
    auto push_word = [&](uint16_t w) {
        out.push_back(static_cast<uint8_t>(w & 0xFF));
        out.push_back(static_cast<uint8_t>(w >> 8));
    };
    long long last = 0;
    for (const auto& entry : entries) {
        long long delta = static_cast<long long>(entry.sample_index) - last;
        if (delta < 0)
            throw Error(ErrorCode::Config, "annotations must be time-ordered");
        if (delta > 1023) {
            push_word(static_cast<uint16_t>(59 << 10));  // SKIP
            uint32_t interval = static_cast<uint32_t>(delta);
            push_word(static_cast<uint16_t>(interval >> 16));
            push_word(static_cast<uint16_t>(interval & 0xFFFF));
            delta = 0;
        }
        push_word(static_cast<uint16_t>((entry.code << 10) | (delta & 0x3FF)));
        last = static_cast<long long>(entry.sample_index);
    }
    push_word(0);
    return out;
}

void write_record(const std::string& dir, const RecordHeader& header,
                  const std::vector<int16_t>& digital,
                  const std::vector<AnnotationEntry>& annotations) {
    if (digital.size() != header.n_samples * header.n_channels)
        throw Error(ErrorCode::Config, "digital sample count does not match header");

    RecordHeader filled = header;
    for (int ch = 0; ch < header.n_channels; ++ch) {
        int32_t checksum = 0;
        for (size_t i = 0; i < header.n_samples; ++i)
            checksum += digital[i * header.n_channels + ch];
        filled.channels[ch].checksum = static_cast<int16_t>(checksum & 0xFFFF);
        filled.channels[ch].has_checksum = true;
        if (header.n_samples > 0)
            filled.channels[ch].init_value = digital[ch];
    }

    ensure_dir(dir);
    fs::path base = fs::path(dir) / header.record_name;
    write_text_file_atomic(base.string() + ".hea", format_header(filled));
    auto packed = pack_212(digital);
    write_file_atomic((fs::path(dir) / filled.channels[0].file).string(), packed);
    auto ann = format_annotations(annotations);
    write_file_atomic(base.string() + ".atr", ann);
}

} // namespace ecgres::wfdb
