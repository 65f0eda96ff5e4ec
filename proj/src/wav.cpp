#include "lantern/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace lantern::wav {

namespace {

std::uint32_t u32(const char* p) {
    return std::uint32_t(std::uint8_t(p[0])) | std::uint32_t(std::uint8_t(p[1])) << 8 |
           std::uint32_t(std::uint8_t(p[2])) << 16 | std::uint32_t(std::uint8_t(p[3])) << 24;
}
std::uint16_t u16(const char* p) { return std::uint16_t(std::uint8_t(p[0]) | std::uint8_t(p[1]) << 8); }

void put32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put16(std::ostream& out, std::uint16_t v) {
    out.put(static_cast<char>(v & 0xFF));
    out.put(static_cast<char>(v >> 8));
}

}  // namespace

behaviors::AudioClip load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open audio file " + path);
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 12 || data.compare(0, 4, "RIFF") != 0 || data.compare(8, 4, "WAVE") != 0)
        throw ConfigError(path + ": not a RIFF/WAVE file");

    int format = 0, channels = 0, bits = 0;
    double rate = 0.0;
    const char* pcm = nullptr;
    std::size_t pcm_bytes = 0;
    for (std::size_t at = 12; at + 8 <= data.size();) {
        const std::string id = data.substr(at, 4);
        const std::size_t size = u32(&data[at + 4]);
        const std::size_t body = at + 8;
        if (body + size > data.size() && id != "data") break;
        if (id == "fmt " && size >= 16) {
            format = u16(&data[body]);
            channels = u16(&data[body + 2]);
            rate = u32(&data[body + 4]);
            bits = u16(&data[body + 14]);
            if (format == 0xFFFE && size >= 26) format = u16(&data[body + 24]);
        } else if (id == "data") {
            pcm = &data[body];
            pcm_bytes = std::min(size, data.size() - body);
        }
        at = body + size + (size & 1);
    }
    if (!pcm || channels <= 0 || rate <= 0.0) throw ConfigError(path + ": missing fmt or data chunk");
    if (!((format == 1 && bits == 16) || (format == 3 && bits == 32)))
        throw ConfigError(path + ": only 16-bit PCM and 32-bit float WAV are supported");

    const std::size_t width = static_cast<std::size_t>(bits / 8);
    const std::size_t frames = pcm_bytes / (width * static_cast<std::size_t>(channels));
    behaviors::AudioClip clip;
    clip.rate_hz = rate;
    clip.samples.resize(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double sum = 0.0;
        for (int c = 0; c < channels; ++c) {
            const char* p = pcm + (f * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)) * width;
            if (format == 1) {
                sum += static_cast<std::int16_t>(u16(p)) / 32768.0;
            } else {
                float v;
                const std::uint32_t bitsv = u32(p);
                std::memcpy(&v, &bitsv, sizeof v);
                sum += v;
            }
        }
        clip.samples[f] = static_cast<float>(sum / channels);
    }
    return clip;
}

void save(const std::string& path, const behaviors::AudioClip& clip) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    const auto n = static_cast<std::uint32_t>(clip.samples.size());
    const auto rate = static_cast<std::uint32_t>(clip.rate_hz);
    out.write("RIFF", 4);
    put32(out, 36 + n * 2);
    out.write("WAVEfmt ", 8);
    put32(out, 16);
    put16(out, 1);
    put16(out, 1);
    put32(out, rate);
    put32(out, rate * 2);
    put16(out, 2);
    put16(out, 16);
    out.write("data", 4);
    put32(out, n * 2);
    for (float s : clip.samples) {
        const double c = std::clamp(static_cast<double>(s), -1.0, 1.0);
        put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32767.0))));
    }
}

}  // namespace lantern::wav
