#include "lantern/engine.hpp"

#include <algorithm>
#include <cmath>

namespace lantern::engine {

using behaviors::BehaviorInstance;
using behaviors::BehaviorSpec;
using behaviors::Sample;

std::string to_string(Status s) {
    switch (s) {
        case Status::ack: return "ack";
        case Status::busy: return "busy";
        case Status::not_found: return "not_found";
        case Status::invalid: return "invalid";
    }
    return "?";
}

std::string to_string(Notice::Kind k) {
    switch (k) {
        case Notice::Kind::started: return "started";
        case Notice::Kind::phase: return "phase";
        case Notice::Kind::finished: return "finished";
        case Notice::Kind::released: return "released";
        case Notice::Kind::gesture: return "gesture";
        case Notice::Kind::warning: return "warning";
    }
    return "?";
}

struct Engine::Slot {
    std::string id;
    ChannelSet channels;
    std::unique_ptr<BehaviorInstance> instance;
    std::int64_t start_ms = 0;  // frame time at which local time is zero
    double servo_from = 0.0;    // setpoint the ramp-in starts from
    bool stopping = false;
    std::int64_t stop_ms = 0;
    Sample stop_from;
    Sample last_out;  // last blended output, where a ramp-down starts
};

struct Engine::Pending {
    std::string id;
    ChannelSet channels;
    BehaviorSpec spec;
};

Engine::Engine(EngineConfig cfg, std::vector<BehaviorDef> defs) : cfg_(cfg) {
    if (cfg_.tick_ms <= 0) throw ConfigError("engine.tick_ms must be positive");
    if (cfg_.pixel_count <= 0) throw ConfigError("device.pixel_count must be positive");
    if (!(cfg_.ramp_s >= 0.0)) throw ConfigError("engine.ramp_s must be non-negative");
    for (auto& d : defs) register_behavior(std::move(d));
    last_frame_.led.assign(static_cast<std::size_t>(cfg_.pixel_count), Rgb{});
}

Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

void Engine::register_behavior(BehaviorDef def) {
    if (def.id.empty() || def.channels.empty() || !def.make)
        throw ConfigError("behavior definition '" + def.id + "' is incomplete");
    if (registry_.contains(def.id)) throw ConfigError("behavior '" + def.id + "' is already registered");
    registry_.emplace(def.id, std::move(def));
}

void Engine::notice(Notice::Kind kind, std::string behavior, std::string detail, std::int64_t t_ms) {
    notices_.push_back({kind, t_ms, std::move(behavior), std::move(detail)});
}

std::vector<Notice> Engine::take_notices() {
    std::vector<Notice> out;
    out.swap(notices_);
    return out;
}

bool Engine::channels_busy(ChannelSet channels, const std::string* except_pending) const {
    for (const auto& s : slots_)
        if (s.channels.intersects(channels)) return true;
    for (const auto& p : pending_)
        if ((!except_pending || p.id != *except_pending) && p.channels.intersects(channels)) return true;
    return false;
}

void Engine::begin_stop(Slot& slot, std::int64_t at_ms) {
    if (slot.stopping) return;
    slot.stopping = true;
    slot.stop_ms = at_ms;
    slot.stop_from = slot.last_out;
}

Reply Engine::start(const std::string& id, const Params& params, bool preempt) {
    auto it = registry_.find(id);
    if (it == registry_.end()) return {Status::not_found, "unknown behavior '" + id + "'"};

    Params merged = it->second.defaults;
    for (const auto& [k, v] : params) merged[k] = v;
    BehaviorSpec spec;
    try {
        spec = it->second.make(merged);
        spec.validate();
    } catch (const std::exception& e) {
        return {Status::invalid, e.what()};
    }

    const ChannelSet wanted = spec.channels;
    if (channels_busy(wanted)) {
        if (!preempt) {
            std::string holder;
            for (const auto& s : slots_)
                if (s.channels.intersects(wanted)) holder = s.id;
            for (const auto& p : pending_)
                if (holder.empty() && p.channels.intersects(wanted)) holder = p.id;
            return {Status::busy, "channels held by '" + holder + "'"};
        }
        for (auto& s : slots_)
            if (s.channels.intersects(wanted)) begin_stop(s, clock_ms_);
        std::erase_if(pending_, [&](const Pending& p) { return p.channels.intersects(wanted); });
        for (const auto& w : spec.warnings) notice(Notice::Kind::warning, id, w, clock_ms_);
        pending_.push_back({id, wanted, std::move(spec)});
        return {Status::ack, "preempting"};
    }

    for (const auto& w : spec.warnings) notice(Notice::Kind::warning, id, w, clock_ms_);
    Slot slot;
    slot.id = id;
    slot.channels = wanted;
    slot.instance = std::make_unique<BehaviorInstance>(std::move(spec));
    slot.start_ms = clock_ms_ + cfg_.tick_ms;
    slot.servo_from = last_frame_.servo_compression;
    slots_.push_back(std::move(slot));
    notice(Notice::Kind::started, id, std::string(slots_.back().instance->phase()), clock_ms_);
    return {Status::ack, {}};
}

Reply Engine::stop(const std::string& id) {
    if (!registry_.contains(id)) return {Status::not_found, "unknown behavior '" + id + "'"};
    std::erase_if(pending_, [&](const Pending& p) { return p.id == id; });
    for (auto& s : slots_)
        if (s.id == id) begin_stop(s, clock_ms_);
    return {Status::ack, {}};
}

Reply Engine::set_param(const std::string& id, const std::string& key, double value) {
    auto it = registry_.find(id);
    if (it == registry_.end()) return {Status::not_found, "unknown behavior '" + id + "'"};
    if (!it->second.defaults.contains(key)) return {Status::not_found, "behavior '" + id + "' has no parameter '" + key + "'"};

    Params candidate = it->second.defaults;
    for (const auto& s : slots_)
        if (s.id == id && !s.stopping) candidate = s.instance->spec().params;
    candidate[key] = value;
    try {
        // The factory may clamp; the running instance gets what it would have been built with.
        const auto rebuilt = it->second.make(candidate);
        if (auto p = rebuilt.params.find(key); p != rebuilt.params.end()) value = p->second;
    } catch (const std::exception& e) {
        return {Status::invalid, e.what()};
    }
    it->second.defaults[key] = value;
    param_updates_.emplace_back(id, key, value);
    return {Status::ack, {}};
}

std::vector<BehaviorStatus> Engine::list() const {
    std::vector<BehaviorStatus> out;
    for (const auto& [id, def] : registry_) {
        BehaviorStatus st{id, def.channels, def.defaults, false, false, false, {}};
        for (const auto& s : slots_) {
            if (s.id != id) continue;
            st.active = true;
            st.stopping = s.stopping;
            st.phase = std::string(s.instance->phase());
        }
        for (const auto& p : pending_)
            if (p.id == id) st.pending = true;
        out.push_back(std::move(st));
    }
    return out;
}

void Engine::inject(GestureKind kind, const std::string& source, std::optional<int> zone) {
    events_.push_back({kind, clock_ms_, source, ++source_seq_[source], zone});
}

bool Engine::idle() const { return slots_.empty() && pending_.empty(); }

std::optional<std::string> Engine::owner(Channel c) const {
    for (const auto& s : slots_)
        if (s.channels.contains(c)) return s.id;
    return std::nullopt;
}

ActuatorFrame Engine::tick() {
    const std::int64_t t = clock_ms_ + cfg_.tick_ms;
    const auto ramp_ms = static_cast<std::int64_t>(std::llround(cfg_.ramp_s * 1000.0));
    auto local_s = [t](const Slot& s) { return static_cast<double>(t - s.start_ms) / 1000.0; };

    for (auto& [id, key, value] : param_updates_)
        for (auto& s : slots_)
            if (s.id == id && !s.stopping) s.instance->params()[key] = value;
    param_updates_.clear();

    // Ramp-downs that have run their course give their channels back.
    std::erase_if(slots_, [&](const Slot& s) {
        if (!s.stopping || t - s.stop_ms < ramp_ms) return false;
        notice(Notice::Kind::released, s.id, {}, t);
        return true;
    });

    for (std::size_t i = 0; i < pending_.size();) {
        if (channels_busy(pending_[i].channels, &pending_[i].id)) {
            ++i;
            continue;
        }
        Slot slot;
        slot.id = pending_[i].id;
        slot.channels = pending_[i].channels;
        slot.instance = std::make_unique<BehaviorInstance>(std::move(pending_[i].spec));
        slot.start_ms = t;
        slot.servo_from = last_frame_.servo_compression;
        notice(Notice::Kind::started, slot.id, std::string(slot.instance->phase()), t);
        slots_.push_back(std::move(slot));
        pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(i));
    }

    // FIFO by arrival; same-instant events ordered by (source, sequence).
    std::stable_sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) {
        return std::tie(a.arrival_ms, a.source, a.seq) < std::tie(b.arrival_ms, b.source, b.seq);
    });
    for (const auto& e : events_) {
        notice(Notice::Kind::gesture, {}, perception::to_string(e.kind), t);
        for (auto& s : slots_) {
            if (s.stopping) continue;
            s.instance->step(local_s(s));
            s.instance->handle(e.kind, local_s(s));
        }
    }
    events_.clear();

    ActuatorFrame frame;
    frame.t_ms = t;
    frame.led.assign(static_cast<std::size_t>(cfg_.pixel_count), Rgb{});
    servo_writers_ = 0;
    const Slot* headline = nullptr;

    for (auto& s : slots_) {
        Sample out;
        if (!s.stopping) {
            out = s.instance->step(local_s(s));
            for (auto& m : s.instance->take_markers()) {
                if (m.to.empty())
                    notice(Notice::Kind::finished, s.id, m.from, t);
                else
                    notice(Notice::Kind::phase, s.id, m.to, t);
            }
            if (s.instance->finished()) begin_stop(s, t - cfg_.tick_ms);
        }
        if (s.stopping) {
            const double keep =
                ramp_ms > 0 ? 1.0 - std::clamp(double(t - s.stop_ms) / double(ramp_ms), 0.0, 1.0) : 0.0;
            out = {};
            out.servo = s.stop_from.servo.value_or(0.0) * keep;
            out.vibration = s.stop_from.vibration.value_or(0.0) * keep;
            if (s.stop_from.led) {
                auto c = *s.stop_from.led;
                auto f = [keep](std::uint8_t v) { return static_cast<std::uint8_t>(std::floor(v * keep + 0.5)); };
                out.led = Rgb{f(c.r), f(c.g), f(c.b)};
            }
        } else if (out.servo && ramp_ms > 0 && t - s.start_ms < ramp_ms) {
            const double a = double(t - s.start_ms) / double(ramp_ms);
            out.servo = s.servo_from + (*out.servo - s.servo_from) * a;
        }
        if (!s.stopping) s.last_out = out;

        if (s.channels.contains(Channel::servo)) {
            ++servo_writers_;
            frame.servo_compression = std::clamp(out.servo.value_or(0.0), 0.0, 1.0);
            headline = &s;
        }
        if (s.channels.contains(Channel::vibration))
            frame.vibration_amplitude = std::clamp(out.vibration.value_or(0.0), 0.0, 1.0);
        if (s.channels.contains(Channel::led)) std::fill(frame.led.begin(), frame.led.end(), out.led.value_or(Rgb{}));
        if (!headline) headline = &s;
    }
    if (headline) {
        frame.active_behavior = headline->id;
        frame.phase = std::string(headline->instance->phase());
    }

    clock_ms_ = t;
    last_frame_ = frame;
    return frame;
}

}  // namespace lantern::engine
