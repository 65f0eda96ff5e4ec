#include "lantern/behaviors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lantern::behaviors {

void BehaviorSpec::validate() const {
    if (id.empty()) throw ConfigError("behavior id must not be empty");
    if (channels.empty()) throw ConfigError("behavior '" + id + "' claims no channels");
    if (phases.empty()) throw ConfigError("behavior '" + id + "' has no phases");
    if (!generate) throw ConfigError("behavior '" + id + "' has no generator");

    std::set<std::string> names;
    for (const auto& p : phases) {
        if (!names.insert(p.name).second) throw ConfigError("behavior '" + id + "' repeats phase '" + p.name + "'");
        if (p.duration_s && !(*p.duration_s >= 0.0))
            throw ConfigError("behavior '" + id + "' phase '" + p.name + "' has a negative duration");
    }
    auto check_target = [&](const std::string& from, const std::string& target) {
        if (!target.empty() && !names.contains(target))
            throw ConfigError("behavior '" + id + "' phase '" + from + "' targets unknown phase '" + target + "'");
    };
    for (const auto& p : phases) {
        if (p.duration_s) check_target(p.name, p.next);
        for (const auto& e : p.on_events) {
            if (e.target.empty()) throw ConfigError("behavior '" + id + "' has an event exit without a target");
            check_target(p.name, e.target);
        }
    }

    std::set<std::string> reached{phases.front().name};
    std::vector<std::string> frontier{phases.front().name};
    while (!frontier.empty()) {
        const auto idx = *phase_index(frontier.back());
        frontier.pop_back();
        std::vector<std::string> targets;
        if (phases[idx].duration_s && !phases[idx].next.empty()) targets.push_back(phases[idx].next);
        for (const auto& e : phases[idx].on_events) targets.push_back(e.target);
        for (auto& t : targets)
            if (reached.insert(t).second) frontier.push_back(t);
    }
    for (const auto& p : phases)
        if (!reached.contains(p.name))
            throw ConfigError("behavior '" + id + "' phase '" + p.name + "' is unreachable");
}

std::optional<std::size_t> BehaviorSpec::phase_index(std::string_view name) const {
    for (std::size_t i = 0; i < phases.size(); ++i)
        if (phases[i].name == name) return i;
    return std::nullopt;
}

BehaviorInstance::BehaviorInstance(BehaviorSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

std::string_view BehaviorInstance::phase() const {
    return finished_ ? std::string_view{} : std::string_view{spec_.phases[current_].name};
}

void BehaviorInstance::enter(std::optional<std::size_t> target, double t_s) {
    PhaseMarker m{t_s, spec_.phases[current_].name, {}};
    entry_ = last_;
    if (target) {
        current_ = *target;
        phase_start_s_ = t_s;
        m.to = spec_.phases[current_].name;
    } else {
        finished_ = true;
    }
    markers_.push_back(std::move(m));
}

bool BehaviorInstance::handle(GestureKind kind, double t_s) {
    if (finished_) return false;
    for (const auto& e : spec_.phases[current_].on_events) {
        if (e.on == kind) {
            enter(spec_.phase_index(e.target), t_s);
            return true;
        }
    }
    return false;
}

Sample BehaviorInstance::step(double t_s) {
    constexpr double kEps = 1e-9;
    while (!finished_) {
        const auto& p = spec_.phases[current_];
        if (!p.duration_s || t_s < phase_start_s_ + *p.duration_s - kEps) break;
        const double boundary = phase_start_s_ + *p.duration_s;
        enter(p.next.empty() ? std::nullopt : spec_.phase_index(p.next), boundary);
    }
    if (finished_) return {};

    const PhaseClock clock{current_, spec_.phases[current_].name, t_s - phase_start_s_, t_s, entry_};
    last_ = spec_.generate(clock, spec_.params);
    return last_;
}

std::vector<PhaseMarker> BehaviorInstance::take_markers() {
    std::vector<PhaseMarker> out;
    out.swap(markers_);
    return out;
}

BehaviorTrace render(const BehaviorSpec& spec, double duration_s, int tick_ms, std::span<const ScheduledEvent> events) {
    if (tick_ms <= 0) throw ConfigError("tick_ms must be positive");
    BehaviorInstance inst(spec);
    BehaviorTrace trace;
    std::vector<ScheduledEvent> pending(events.begin(), events.end());
    std::stable_sort(pending.begin(), pending.end(),
                     [](const ScheduledEvent& a, const ScheduledEvent& b) { return a.t_s < b.t_s; });
    std::size_t next_event = 0;

    const auto ticks = static_cast<std::int64_t>(std::llround(duration_s * 1000.0 / tick_ms));
    for (std::int64_t k = 0; k < ticks; ++k) {
        const std::int64_t t_ms = k * tick_ms;
        const double t_s = static_cast<double>(t_ms) / 1000.0;
        while (next_event < pending.size() && pending[next_event].t_s <= t_s + 1e-9) {
            inst.step(t_s);  // settle time-based transitions before the event
            inst.handle(pending[next_event].kind, t_s);
            ++next_event;
        }
        const Sample s = inst.step(t_s);
        auto markers = inst.take_markers();
        trace.markers.insert(trace.markers.end(), markers.begin(), markers.end());
        if (inst.finished()) break;
        trace.frames.push_back({t_ms, s.servo.value_or(0.0), s.vibration.value_or(0.0), s.led.value_or(Rgb{}),
                                std::string(inst.phase())});
    }
    return trace;
}

}  // namespace lantern::behaviors
