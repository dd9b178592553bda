#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "biphoton/tags.hpp"

namespace biphoton {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'A', 'G'};
constexpr std::uint8_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<unsigned char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> b;
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (!in) throw std::runtime_error("tag file truncated inside a 64-bit field");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

TagStream read_binary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a tag file: bad magic (expected TTAG)");
    char version = 0;
    in.read(&version, 1);
    if (!in || static_cast<std::uint8_t>(version) != kVersion)
        throw std::runtime_error("unsupported tag file version " +
                                 std::to_string(static_cast<int>(version)));

    TagStream stream;
    stream.ticks_per_second = get_u64(in);
    stream.duration_ticks = get_u64(in);

    while (true) {
        char channel = 0;
        in.read(&channel, 1);
        if (in.eof()) break;
        if (!in) throw std::runtime_error("tag file truncated inside a record");
        TagEvent e;
        e.channel = static_cast<std::uint8_t>(channel);
        e.t = get_u64(in);
        stream.events.push_back(e);
    }
    stream.validate();
    return stream;
}

TagStream read_csv(std::istream& in) {
    TagStream stream;
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t max_t = 0;
    bool saw_duration = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            // the writer records the clock in a comment so CSV round-trips
            const auto pos = line.find("duration_ticks=");
            if (pos != std::string::npos) {
                std::uint64_t d = 0;
                if (std::from_chars(line.data() + pos + 15,
                                    line.data() + line.size(), d)
                        .ec == std::errc{}) {
                    stream.duration_ticks = d;
                    saw_duration = true;
                }
            }
            const auto tps = line.find("ticks_per_second=");
            if (tps != std::string::npos) {
                std::uint64_t v = 0;
                if (std::from_chars(line.data() + tps + 17,
                                    line.data() + line.size(), v)
                        .ec == std::errc{} &&
                    v > 0)
                    stream.ticks_per_second = v;
            }
            continue;
        }
        if (line.rfind("channel", 0) == 0) continue;  // header

        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("tag CSV line " + std::to_string(line_no) +
                                     ": expected 'channel,t_ps'");
        unsigned channel = 0;
        std::uint64_t t = 0;
        const char* begin = line.data();
        auto r1 = std::from_chars(begin, begin + comma, channel);
        auto r2 = std::from_chars(begin + comma + 1, begin + line.size(), t);
        if (r1.ec != std::errc{} || r2.ec != std::errc{})
            throw std::runtime_error("tag CSV line " + std::to_string(line_no) +
                                     ": malformed number");
        stream.events.push_back({static_cast<std::uint8_t>(channel), t});
        max_t = std::max(max_t, t);
    }
    if (!saw_duration) stream.duration_ticks = stream.events.empty() ? 0 : max_t + 1;
    stream.validate();
    return stream;
}

}  // namespace

void write_tags(const TagStream& stream, const std::filesystem::path& path,
                TagFormat format) {
    stream.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");

    if (format == TagFormat::binary) {
        out.write(kMagic, 4);
        out.put(static_cast<char>(kVersion));
        put_u64(out, stream.ticks_per_second);
        put_u64(out, stream.duration_ticks);
        for (const TagEvent& e : stream.events) {
            out.put(static_cast<char>(e.channel));
            put_u64(out, e.t);
        }
    } else {
        out << "# ticks_per_second=" << stream.ticks_per_second
            << " duration_ticks=" << stream.duration_ticks << '\n';
        out << "channel,t_ps\n";
        for (const TagEvent& e : stream.events)
            out << static_cast<int>(e.channel) << ',' << e.t << '\n';
    }
    if (!out) throw std::runtime_error("short write to '" + path.string() + "'");
}

TagStream read_tags(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    char magic[4] = {};
    in.read(magic, 4);
    in.clear();
    in.seekg(0);
    if (std::memcmp(magic, kMagic, 4) == 0) return read_binary(in);
    return read_csv(in);
}

}  // namespace biphoton
