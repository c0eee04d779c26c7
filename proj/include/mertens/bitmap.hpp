#pragma once

// Packed threshold flags over a uniform ln-x grid: bit j stands for the point
// ln_start + j * step and lives in byte j / 8 at bit position j % 8.
//
// File layout (all integers and doubles little-endian):
//   offset 0   8 bytes  magic "MQFLAGS1"
//          8   u32      format version (1)
//         12   u32      L, length of ln_start
//         16   L bytes  ln_start as an ASCII decimal
//       16+L   f64      step
//       24+L   u64      count (number of grid points)
//       32+L   f64      threshold
//       40+L   ceil(count / 8) bytes of flags; unused high bits of the last
//                       byte are zero

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mertens {

class FlagBitmap {
public:
    FlagBitmap() = default;
    FlagBitmap(std::string ln_start, double step, std::uint64_t count, double threshold);

    const std::string& ln_start() const { return ln_start_; }
    double step() const { return step_; }
    double threshold() const { return threshold_; }
    std::uint64_t count() const { return count_; }
    const std::vector<std::uint8_t>& bytes() const { return bits_; }

    bool test(std::uint64_t j) const { return (bits_[j >> 3] >> (j & 7)) & 1; }
    void set(std::uint64_t j, bool on = true) {
        const auto mask = static_cast<std::uint8_t>(1u << (j & 7));
        bits_[j >> 3] = on ? (bits_[j >> 3] | mask) : (bits_[j >> 3] & ~mask);
    }
    std::uint64_t popcount() const;
    std::vector<std::uint64_t> set_positions() const;

    friend bool operator==(const FlagBitmap&, const FlagBitmap&) = default;

private:
    std::string ln_start_ = "0";
    double step_ = 0;
    std::uint64_t count_ = 0;
    double threshold_ = 0;
    std::vector<std::uint8_t> bits_;
};

std::vector<std::uint8_t> pack_flags(const std::vector<bool>& flags);
std::vector<bool> unpack_flags(const std::vector<std::uint8_t>& bytes, std::uint64_t count);

std::string encode_bitmap(const FlagBitmap& bitmap);
FlagBitmap decode_bitmap(std::string_view bytes);
void write_bitmap(const std::string& path, const FlagBitmap& bitmap);
FlagBitmap read_bitmap(const std::string& path);

}  // namespace mertens
