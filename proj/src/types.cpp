#include "lantern/types.hpp"

namespace lantern {

std::string to_string(Channel c) {
    switch (c) {
        case Channel::servo: return "servo";
        case Channel::vibration: return "vibration";
        case Channel::led: return "led";
    }
    return "unknown";
}

Channel channel_from_string(const std::string& name) {
    if (name == "servo") return Channel::servo;
    if (name == "vibration") return Channel::vibration;
    if (name == "led") return Channel::led;
    throw ConfigError("unknown channel '" + name + "'");
}

double param_or(const Params& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

}  // namespace lantern
