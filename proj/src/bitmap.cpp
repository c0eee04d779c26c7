#include "mertens/bitmap.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mertens/errors.hpp"

namespace mertens {

namespace {

constexpr char magic[8] = {'M', 'Q', 'F', 'L', 'A', 'G', 'S', '1'};
constexpr std::uint32_t version = 1;

template <class T>
void put(std::string& out, T v) {
    static_assert(std::endian::native == std::endian::little);
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T take(std::string_view bytes, std::size_t& pos) {
    if (bytes.size() - pos < sizeof(T)) throw ParseError("bitmap file truncated");
    T v;
    std::memcpy(&v, bytes.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

}  // namespace

FlagBitmap::FlagBitmap(std::string ln_start, double step, std::uint64_t count, double threshold)
    : ln_start_(std::move(ln_start)), step_(step), count_(count), threshold_(threshold), bits_((count + 7) / 8, 0) {}

std::uint64_t FlagBitmap::popcount() const {
    std::uint64_t n = 0;
    for (std::uint8_t b : bits_) n += static_cast<std::uint64_t>(std::popcount(b));
    return n;
}

std::vector<std::uint64_t> FlagBitmap::set_positions() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0; i < bits_.size(); ++i)
        for (unsigned b = 0; b < 8; ++b)
            if ((bits_[i] >> b) & 1) out.push_back(8 * i + b);
    return out;
}

std::vector<std::uint8_t> pack_flags(const std::vector<bool>& flags) {
    std::vector<std::uint8_t> out((flags.size() + 7) / 8, 0);
    for (std::size_t j = 0; j < flags.size(); ++j)
        if (flags[j]) out[j >> 3] |= static_cast<std::uint8_t>(1u << (j & 7));
    return out;
}

std::vector<bool> unpack_flags(const std::vector<std::uint8_t>& bytes, std::uint64_t count) {
    if (bytes.size() < (count + 7) / 8) throw PreconditionError("too few bytes for the flag count");
    std::vector<bool> out(count);
    for (std::uint64_t j = 0; j < count; ++j) out[j] = (bytes[j >> 3] >> (j & 7)) & 1;
    return out;
}

std::string encode_bitmap(const FlagBitmap& bitmap) {
    std::string out(magic, sizeof magic);
    put<std::uint32_t>(out, version);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(bitmap.ln_start().size()));
    out += bitmap.ln_start();
    put<double>(out, bitmap.step());
    put<std::uint64_t>(out, bitmap.count());
    put<double>(out, bitmap.threshold());
    out.append(reinterpret_cast<const char*>(bitmap.bytes().data()), bitmap.bytes().size());
    return out;
}

FlagBitmap decode_bitmap(std::string_view bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), magic, sizeof magic) != 0)
        throw ParseError("not a flag bitmap (bad magic)");
    std::size_t pos = 8;
    const auto ver = take<std::uint32_t>(bytes, pos);
    if (ver != version) throw ParseError("unsupported bitmap version " + std::to_string(ver));
    const auto len = take<std::uint32_t>(bytes, pos);
    if (bytes.size() - pos < len) throw ParseError("bitmap file truncated");
    std::string ln_start(bytes.substr(pos, len));
    pos += len;
    const auto step = take<double>(bytes, pos);
    const auto count = take<std::uint64_t>(bytes, pos);
    const auto threshold = take<double>(bytes, pos);
    const std::uint64_t nbytes = (count + 7) / 8;
    if (bytes.size() - pos != nbytes) throw ParseError("bitmap payload size does not match count");
    FlagBitmap bm(std::move(ln_start), step, count, threshold);
    for (std::uint64_t j = 0; j < count; ++j)
        if ((static_cast<std::uint8_t>(bytes[pos + (j >> 3)]) >> (j & 7)) & 1) bm.set(j);
    if (count % 8 && (static_cast<std::uint8_t>(bytes.back()) >> (count % 8)) != 0)
        throw ParseError("nonzero padding bits in bitmap");
    return bm;
}

void write_bitmap(const std::string& path, const FlagBitmap& bitmap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    const std::string bytes = encode_bitmap(bitmap);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for '" + path + "'");
}

FlagBitmap read_bitmap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return decode_bitmap(bytes);
}

}  // namespace mertens
