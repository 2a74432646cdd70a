#include "sonavol/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

namespace sonavol::wav {

namespace {

constexpr double kFullScale = 32767.0;

void put_u16(std::ostream& out, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
    out.write(b, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void read_exact(std::istream& in, unsigned char* dst, std::size_t n, const char* what) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw std::runtime_error(std::string("WAV: truncated ") + what);
    }
}

} // namespace

void write(std::ostream& out, const EchoTrace& trace, Scaling scaling) {
    trace.validate();
    const double rate = std::round(trace.sample_rate);
    if (rate < 1.0 || rate > 4294967295.0) {
        throw std::invalid_argument("WAV: sample rate not representable");
    }

    double gain = 1.0;
    if (scaling == Scaling::NormalizePeak) {
        double peak = 0.0;
        for (double s : trace.samples) {
            peak = std::max(peak, std::abs(s));
        }
        if (peak > 0.0) {
            gain = kNormalizedPeak / peak;
        }
    }

    const auto data_bytes = static_cast<std::uint32_t>(trace.samples.size() * 2);
    out.write("RIFF", 4);
    put_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put_u32(out, 16);
    put_u16(out, 1); // PCM
    put_u16(out, 1); // mono
    put_u32(out, static_cast<std::uint32_t>(rate));
    put_u32(out, static_cast<std::uint32_t>(rate) * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out.write("data", 4);
    put_u32(out, data_bytes);
    for (double s : trace.samples) {
        const double v = std::clamp(std::round(s * gain * kFullScale), -kFullScale, kFullScale);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
    if (!out) {
        throw std::runtime_error("WAV: write failed");
    }
}

void write(const std::filesystem::path& path, const EchoTrace& trace, Scaling scaling) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write(out, trace, scaling);
}

EchoTrace read(std::istream& in, TraceRole role) {
    std::array<unsigned char, 12> riff{};
    read_exact(in, riff.data(), riff.size(), "RIFF header");
    if (std::string(reinterpret_cast<char*>(riff.data()), 4) != "RIFF" ||
        std::string(reinterpret_cast<char*>(riff.data()) + 8, 4) != "WAVE") {
        throw std::runtime_error("WAV: not a RIFF/WAVE file");
    }

    bool have_fmt = false;
    std::uint32_t rate = 0;
    for (;;) {
        std::array<unsigned char, 8> hdr{};
        read_exact(in, hdr.data(), hdr.size(), "chunk header");
        const std::string id(reinterpret_cast<char*>(hdr.data()), 4);
        const std::uint32_t size = get_u32(hdr.data() + 4);

        if (id == "fmt ") {
            if (size < 16) {
                throw std::runtime_error("WAV: fmt chunk too small");
            }
            std::vector<unsigned char> fmt(size + (size & 1));
            read_exact(in, fmt.data(), fmt.size(), "fmt chunk");
            const std::uint16_t format = get_u16(fmt.data());
            const std::uint16_t channels = get_u16(fmt.data() + 2);
            rate = get_u32(fmt.data() + 4);
            const std::uint16_t bits = get_u16(fmt.data() + 14);
            if (format != 1 || bits != 16) {
                throw std::runtime_error("WAV: only 16-bit PCM is supported");
            }
            if (channels != 1) {
                throw std::runtime_error("WAV: only mono files are supported");
            }
            if (rate == 0) {
                throw std::runtime_error("WAV: zero sample rate");
            }
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) {
                throw std::runtime_error("WAV: data chunk before fmt chunk");
            }
            std::vector<unsigned char> raw(size);
            read_exact(in, raw.data(), raw.size(), "data chunk");
            EchoTrace trace;
            trace.sample_rate = rate;
            trace.role = role;
            trace.samples.resize(size / 2);
            for (std::size_t i = 0; i < trace.samples.size(); ++i) {
                const auto v = static_cast<std::int16_t>(get_u16(raw.data() + 2 * i));
                trace.samples[i] = static_cast<double>(v) / kFullScale;
            }
            if (trace.samples.empty()) {
                throw std::runtime_error("WAV: no samples");
            }
            return trace;
        } else {
            in.ignore(static_cast<std::streamsize>(size) + (size & 1));
            if (!in) {
                throw std::runtime_error("WAV: truncated chunk '" + id + "'");
            }
        }
    }
}

EchoTrace read(const std::filesystem::path& path, TraceRole role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read(in, role);
}

} // namespace sonavol::wav
