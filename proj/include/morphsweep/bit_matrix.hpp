#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace morphsweep {

// Square n x n binary matrix packed row-major, LSB-first within each byte,
// zero-padded to a whole number of bytes.
class bit_matrix {
public:
    bit_matrix() = default;
    explicit bit_matrix(int n);
    // Adopts an already packed buffer. Throws dimension_mismatch if the size
    // is wrong or a padding bit is set.
    bit_matrix(int n, std::vector<std::uint8_t> packed);

    int n() const { return n_; }

    bool get(int i, int j) const {
        const std::size_t b = bit_index(i, j);
        return (bytes_[b >> 3] >> (b & 7)) & 1u;
    }

    void set(int i, int j, bool value) {
        const std::size_t b = bit_index(i, j);
        const auto mask = static_cast<std::uint8_t>(1u << (b & 7));
        if (value)
            bytes_[b >> 3] |= mask;
        else
            bytes_[b >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    std::size_t popcount() const;
    std::span<const std::uint8_t> bytes() const { return bytes_; }

    static std::size_t packed_size(int n) {
        const auto bits = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
        return (bits + 7) / 8;
    }

    friend bool operator==(const bit_matrix&, const bit_matrix&) = default;

private:
    std::size_t bit_index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }

    int n_ = 0;
    std::vector<std::uint8_t> bytes_;
};

bit_matrix transpose(const bit_matrix& m);

}  // namespace morphsweep
