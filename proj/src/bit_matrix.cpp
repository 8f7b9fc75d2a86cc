#include "morphsweep/bit_matrix.hpp"

#include <bit>
#include <string>

#include "morphsweep/errors.hpp"

namespace morphsweep {

bit_matrix::bit_matrix(int n) : n_(n), bytes_(packed_size(n), 0) {
    if (n < 0) throw dimension_mismatch("negative matrix dimension");
}

bit_matrix::bit_matrix(int n, std::vector<std::uint8_t> packed) : n_(n), bytes_(std::move(packed)) {
    if (n < 0 || bytes_.size() != packed_size(n)) {
        throw dimension_mismatch("packed matrix of " + std::to_string(bytes_.size()) +
                                 " bytes does not fit n = " + std::to_string(n));
    }
    const std::size_t bits = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    if (bits % 8 != 0 && (bytes_.back() >> (bits % 8)) != 0) {
        throw dimension_mismatch("padding bits set in packed matrix");
    }
}

std::size_t bit_matrix::popcount() const {
    std::size_t total = 0;
    for (std::uint8_t b : bytes_) total += static_cast<std::size_t>(std::popcount(b));
    return total;
}

bit_matrix transpose(const bit_matrix& m) {
    bit_matrix out(m.n());
    for (int i = 0; i < m.n(); ++i)
        for (int j = 0; j < m.n(); ++j) out.set(j, i, m.get(i, j));
    return out;
}

}  // namespace morphsweep
