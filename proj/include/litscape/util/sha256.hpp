#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace litscape::sha256 {

// Incremental SHA-256 (FIPS 180-4).
class Hasher {
public:
    Hasher();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<std::uint8_t, 32> finish();

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::uint64_t total_len_ = 0;
    std::size_t buffer_len_ = 0;
};

std::string hex_digest(std::string_view data);
std::string hex_digest_file(const std::string& path);

}  // namespace litscape::sha256
