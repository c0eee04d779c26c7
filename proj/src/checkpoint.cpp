#include "mertens/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mertens/errors.hpp"

namespace mertens {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, u64 v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[off + i])) << (8 * i);
    return v;
}

u64 get_u64(std::string_view in, std::size_t off) {
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<u64>(static_cast<unsigned char>(in[off + i])) << (8 * i);
    return v;
}

constexpr std::size_t header_bytes = 64;

}  // namespace

std::string encode_checkpoint(const Checkpoint& cp) {
    std::string out;
    out.reserve(header_bytes + 8 * cp.acc.size());
    out.append(checkpoint_magic);
    put_u32(out, checkpoint_version);
    put_u32(out, 0);
    put_u64(out, low64(cp.n));
    put_u64(out, high64(cp.n));
    put_u64(out, cp.u);
    put_u64(out, cp.next_y1);
    put_u64(out, static_cast<u64>(cp.m_prev));
    put_u64(out, cp.acc.size());
    for (u64 a : cp.acc) put_u64(out, a);
    return out;
}

Checkpoint decode_checkpoint(std::string_view in) {
    if (in.size() < header_bytes) throw ParseError("checkpoint: truncated header");
    if (in.substr(0, 8) != checkpoint_magic) throw ParseError("checkpoint: bad magic");
    if (get_u32(in, 8) != checkpoint_version) throw ParseError("checkpoint: unsupported version");
    Checkpoint cp;
    cp.n = (static_cast<u128>(get_u64(in, 24)) << 64) | get_u64(in, 16);
    cp.u = get_u64(in, 32);
    cp.next_y1 = get_u64(in, 40);
    cp.m_prev = static_cast<i64>(get_u64(in, 48));
    const u64 count = get_u64(in, 56);
    if (count > (in.size() - header_bytes) / 8 || in.size() != header_bytes + 8 * count)
        throw ParseError("checkpoint: accumulator array length mismatch");
    cp.acc.resize(count);
    for (u64 i = 0; i < count; ++i) cp.acc[i] = get_u64(in, header_bytes + 8 * i);
    return cp;
}

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write checkpoint " + tmp);
        const std::string bytes = encode_checkpoint(cp);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw Error("short write to checkpoint " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot move checkpoint into " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open checkpoint " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return decode_checkpoint(ss.str());
}

}  // namespace mertens
