#include "webcas/exchange/zip.hpp"

#include <zlib.h>

#include <cstdint>
#include <limits>

namespace webcas::exchange {
namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint16_t kUtf8Flag = 0x0800;
constexpr std::uint16_t kDosDate1980 = (0 << 9) | (1 << 5) | 1;

void put16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
    put16(out, static_cast<std::uint16_t>(v & 0xffff));
    put16(out, static_cast<std::uint16_t>(v >> 16));
}

std::uint32_t crc_of(std::string_view data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    std::size_t pos = 0;
    while (pos < data.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
        crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + pos), chunk);
        pos += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

std::string deflate_raw(std::string_view data) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw ZipError("deflateInit failed");
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw ZipError("deflate failed");
    return out;
}

std::string inflate_raw(std::string_view data, std::size_t expected) {
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ZipError("inflateInit failed");
    std::string out(expected, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    // A stream that would produce more than `expected` bytes stops with Z_BUF_ERROR.
    const bool ok = rc == Z_STREAM_END && zs.total_out == expected;
    inflateEnd(&zs);
    if (!ok) throw ZipError("corrupt deflate data");
    return out;
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::uint16_t u16(std::size_t at) const {
        need(at, 2);
        return static_cast<std::uint16_t>(byte(at) | byte(at + 1) << 8);
    }
    std::uint32_t u32(std::size_t at) const {
        return static_cast<std::uint32_t>(u16(at)) | static_cast<std::uint32_t>(u16(at + 2)) << 16;
    }
    std::string_view slice(std::size_t at, std::size_t n) const {
        need(at, n);
        return bytes_.substr(at, n);
    }
    std::size_t size() const { return bytes_.size(); }

private:
    unsigned byte(std::size_t at) const { return static_cast<unsigned char>(bytes_[at]); }
    void need(std::size_t at, std::size_t n) const {
        if (at > bytes_.size() || n > bytes_.size() - at) throw ZipError("truncated archive");
    }
    std::string_view bytes_;
};

}  // namespace

std::string write_zip(const std::vector<ZipEntry>& entries) {
    std::string out;
    std::string central;
    if (entries.size() > std::numeric_limits<std::uint16_t>::max()) throw ZipError("too many entries");
    for (const auto& e : entries) {
        if (e.name.empty() || e.name.size() > 0xffff) throw ZipError("bad entry name");
        if (e.data.size() > 0xfffffffeu) throw ZipError("entry too large: " + e.name);
        const auto crc = crc_of(e.data);
        const auto packed = deflate_raw(e.data);
        const bool store = packed.size() >= e.data.size();
        const std::string_view body = store ? std::string_view(e.data) : std::string_view(packed);
        const auto offset = out.size();
        if (offset > 0xfffffffeu) throw ZipError("archive too large");

        put32(out, kLocalSig);
        put16(out, 20);
        put16(out, kUtf8Flag);
        put16(out, store ? 0 : 8);
        put16(out, 0);
        put16(out, kDosDate1980);
        put32(out, crc);
        put32(out, static_cast<std::uint32_t>(body.size()));
        put32(out, static_cast<std::uint32_t>(e.data.size()));
        put16(out, static_cast<std::uint16_t>(e.name.size()));
        put16(out, 0);
        out += e.name;
        out += body;

        put32(central, kCentralSig);
        put16(central, 20);
        put16(central, 20);
        put16(central, kUtf8Flag);
        put16(central, store ? 0 : 8);
        put16(central, 0);
        put16(central, kDosDate1980);
        put32(central, crc);
        put32(central, static_cast<std::uint32_t>(body.size()));
        put32(central, static_cast<std::uint32_t>(e.data.size()));
        put16(central, static_cast<std::uint16_t>(e.name.size()));
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, 0);
        put32(central, static_cast<std::uint32_t>(offset));
        central += e.name;
    }
    const auto central_offset = out.size();
    out += central;
    put32(out, kEndSig);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, static_cast<std::uint32_t>(central_offset));
    put16(out, 0);
    return out;
}

std::vector<ZipEntry> read_zip(std::string_view bytes, const ZipLimits& limits) {
    Reader r(bytes);
    if (bytes.size() < 22) throw ZipError("not a zip archive (too short)");
    std::size_t end = std::string_view::npos;
    const std::size_t lowest = bytes.size() > 22 + 0xffff ? bytes.size() - 22 - 0xffff : 0;
    for (std::size_t at = bytes.size() - 22 + 1; at-- > lowest;) {
        if (r.u32(at) == kEndSig && at + 22 + r.u16(at + 20) == bytes.size()) {
            end = at;
            break;
        }
    }
    if (end == std::string_view::npos) throw ZipError("not a zip archive (no end of central directory)");
    if (r.u16(end + 4) != 0 || r.u16(end + 6) != 0) throw ZipError("multi-disk archives are not supported");
    const std::size_t count = r.u16(end + 10);
    if (count != r.u16(end + 8)) throw ZipError("inconsistent entry count");
    const std::uint32_t cd_size = r.u32(end + 12);
    const std::uint32_t cd_offset = r.u32(end + 16);
    if (count == 0xffff || cd_size == 0xffffffffu || cd_offset == 0xffffffffu)
        throw ZipError("ZIP64 archives are not supported");
    if (count > limits.max_entries) throw ZipError("too many entries");
    if (static_cast<std::size_t>(cd_offset) + cd_size > end) throw ZipError("central directory out of bounds");

    std::vector<ZipEntry> entries;
    entries.reserve(count);
    std::size_t total = 0;
    std::size_t at = cd_offset;
    for (std::size_t i = 0; i < count; ++i) {
        if (r.u32(at) != kCentralSig) throw ZipError("bad central directory entry");
        const std::uint16_t flags = r.u16(at + 8);
        const std::uint16_t method = r.u16(at + 10);
        const std::uint32_t crc = r.u32(at + 16);
        const std::uint32_t csize = r.u32(at + 20);
        const std::uint32_t usize = r.u32(at + 24);
        const std::uint16_t name_len = r.u16(at + 28);
        const std::uint16_t extra_len = r.u16(at + 30);
        const std::uint16_t comment_len = r.u16(at + 32);
        const std::uint32_t local = r.u32(at + 42);
        std::string name(r.slice(at + 46, name_len));
        at += 46 + std::size_t{name_len} + extra_len + comment_len;
        if (at > static_cast<std::size_t>(cd_offset) + cd_size) throw ZipError("central directory overrun");

        if (flags & 0x0001) throw ZipError("encrypted entry: " + name);
        if (csize == 0xffffffffu || usize == 0xffffffffu || local == 0xffffffffu)
            throw ZipError("ZIP64 entry: " + name);
        if (method != 0 && method != 8) throw ZipError("unsupported compression method for " + name);
        total += usize;
        if (total > limits.max_total_bytes) throw ZipError("archive expands beyond the size limit");

        if (local >= cd_offset || r.u32(local) != kLocalSig) throw ZipError("bad local header for " + name);
        const std::size_t data_at = local + 30 + std::size_t{r.u16(local + 26)} + r.u16(local + 28);
        if (r.slice(local + 30, r.u16(local + 26)) != name) throw ZipError("local header name mismatch for " + name);
        if (data_at + csize > cd_offset) throw ZipError("entry data out of bounds: " + name);
        const auto raw = r.slice(data_at, csize);
        std::string data;
        if (method == 0) {
            if (csize != usize) throw ZipError("size mismatch for stored entry " + name);
            data.assign(raw);
        } else {
            data = inflate_raw(raw, usize);
        }
        if (crc_of(data) != crc) throw ZipError("CRC mismatch for " + name);
        entries.push_back({std::move(name), std::move(data)});
    }
    return entries;
}

}  // namespace webcas::exchange
