#include "ecgres/util.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ecgres/errors.hpp"

namespace fs = std::filesystem;

namespace ecgres {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::Format: return "format";
    case ErrorCode::Data: return "data";
    case ErrorCode::Numeric: return "numeric";
    case ErrorCode::Stale: return "stale";
    case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

uint64_t fnv1a64(std::span<const uint8_t> bytes, uint64_t state) {
    uint64_t h = state;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open for hashing: " + path);
    uint64_t h = 0xcbf29ce484222325ull;
    std::vector<uint8_t> buf(1 << 16);
    while (in) {
        in.read(reinterpret_cast<char*>(buf.data()), buf.size());
        std::streamsize got = in.gcount();
        if (got > 0)
            h = fnv1a64({buf.data(), static_cast<size_t>(got)}, h);
    }
    return h;
}

std::string hash_hex(uint64_t h) {
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::vector<uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open: " + path);
    std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<uint8_t> data(static_cast<size_t>(size));
    if (size > 0 && !in.read(reinterpret_cast<char*>(data.data()), size))
        throw Error(ErrorCode::Io, "short read: " + path);
    return data;
}

std::string read_text_file(const std::string& path) {
    auto raw = read_binary_file(path);
    return std::string(raw.begin(), raw.end());
}

void write_file_atomic(const std::string& path, std::span<const uint8_t> bytes) {
    fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::Io, "cannot create: " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw Error(ErrorCode::Io, "write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_text_file_atomic(const std::string& path, const std::string& text) {
    write_file_atomic(path, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

bool file_exists(const std::string& path) {
    return fs::exists(path);
}

void ensure_dir(const std::string& path) {
    fs::create_directories(path);
}

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    // splitmix64 over (seed, stream)
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace ecgres
