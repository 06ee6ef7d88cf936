#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ecgres {

// FNV-1a 64-bit. Used for artifact staleness detection in run manifests;
// not a cryptographic hash.
uint64_t fnv1a64(std::span<const uint8_t> bytes, uint64_t state = 0xcbf29ce484222325ull);
uint64_t hash_file(const std::string& path);
std::string hash_hex(uint64_t h);

std::vector<uint8_t> read_binary_file(const std::string& path);
std::string read_text_file(const std::string& path);

// Write-then-rename so a crash never leaves a half-written artifact.
void write_file_atomic(const std::string& path, std::span<const uint8_t> bytes);
void write_text_file_atomic(const std::string& path, const std::string& text);

bool file_exists(const std::string& path);
void ensure_dir(const std::string& path);

// Deterministic engine used everywhere randomness is needed: every consumer
// derives its own stream from an explicit seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

} // namespace ecgres
