#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace lantern {

/// Invalid configuration or behavior parameters.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed sensor stream (non-monotone timestamps, rate too low, bad trace line).
class StreamError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class Channel : std::uint8_t { servo = 1, vibration = 2, led = 4 };

/// Small bitset over the three actuator channels.
class ChannelSet {
public:
    constexpr ChannelSet() = default;
    constexpr ChannelSet(std::initializer_list<Channel> channels) {
        for (auto c : channels) bits_ |= static_cast<std::uint8_t>(c);
    }

    constexpr bool contains(Channel c) const { return (bits_ & static_cast<std::uint8_t>(c)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool intersects(ChannelSet other) const { return (bits_ & other.bits_) != 0; }
    constexpr std::uint8_t bits() const { return bits_; }

    friend constexpr bool operator==(ChannelSet, ChannelSet) = default;

private:
    std::uint8_t bits_ = 0;
};

inline constexpr Channel kAllChannels[] = {Channel::servo, Channel::vibration, Channel::led};

std::string to_string(Channel c);
Channel channel_from_string(const std::string& name);

/// Numeric behavior parameters, keyed by name.
using Params = std::map<std::string, double>;

double param_or(const Params& params, const std::string& key, double fallback);

}  // namespace lantern
