#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pingd/problem.hpp"
#include "pingd/vector.hpp"

namespace pingd {

enum class EventKind { OracleCall, TrialPoint, DescentAccept, InnerUpdate, Restart, Terminate, ErrorFlag };

std::string_view to_string(EventKind kind);

/// Event-specific record. Only the fields relevant to the event kind are set.
struct EventPayload {
    std::optional<Vector> point;
    std::optional<double> value;
    std::optional<double> f_current;
    std::optional<double> lambda;
    std::optional<double> beta;
    std::optional<double> m_norm;
    std::optional<double> distance;  // ||y - x_t|| for inner-loop queries
    std::optional<bool> differentiable;
    std::optional<bool> deterministic_point;
    std::optional<std::string> note;
};

struct TraceEvent {
    EventKind kind = EventKind::OracleCall;
    std::uint64_t t = 0;
    std::uint64_t k = 0;
    std::uint64_t call_index = 0;  // oracle calls made so far, inclusive
    EventPayload payload;
};

struct Trace {
    TraceLevel level = TraceLevel::Off;
    std::string oracle_id;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<TraceEvent> events;

    [[nodiscard]] bool records(EventKind kind) const noexcept;
    void push(TraceEvent event);
};

std::string_view to_string(TraceLevel level);
/// Accepts "off", "summary", "full".
TraceLevel parse_trace_level(std::string_view text);

/// JSONL: one header object followed by one object per event.
void write_jsonl(std::ostream& out, const Trace& trace);

}  // namespace pingd
