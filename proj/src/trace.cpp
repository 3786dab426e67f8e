#include "pingd/trace.hpp"

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pingd/sampler.hpp"
#include "pingd/version.hpp"

namespace pingd {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::OracleCall: return "OracleCall";
        case EventKind::TrialPoint: return "TrialPoint";
        case EventKind::DescentAccept: return "DescentAccept";
        case EventKind::InnerUpdate: return "InnerUpdate";
        case EventKind::Restart: return "Restart";
        case EventKind::Terminate: return "Terminate";
        case EventKind::ErrorFlag: return "ErrorFlag";
    }
    return "Unknown";
}

std::string_view to_string(TraceLevel level) {
    switch (level) {
        case TraceLevel::Off: return "off";
        case TraceLevel::Summary: return "summary";
        case TraceLevel::Full: return "full";
    }
    return "off";
}

TraceLevel parse_trace_level(std::string_view text) {
    if (text == "off") return TraceLevel::Off;
    if (text == "summary") return TraceLevel::Summary;
    if (text == "full") return TraceLevel::Full;
    throw std::invalid_argument("trace level must be off, summary or full (got '" + std::string(text) + "')");
}

bool Trace::records(EventKind kind) const noexcept {
    switch (level) {
        case TraceLevel::Off: return false;
        case TraceLevel::Full: return true;
        case TraceLevel::Summary:
            return kind == EventKind::DescentAccept || kind == EventKind::Restart || kind == EventKind::Terminate ||
                   kind == EventKind::ErrorFlag;
    }
    return false;
}

void Trace::push(TraceEvent event) { events.push_back(std::move(event)); }

namespace {

nlohmann::ordered_json payload_json(const EventPayload& p) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    if (p.point) j["point"] = p.point->values();
    if (p.value) j["value"] = *p.value;
    if (p.f_current) j["f_current"] = *p.f_current;
    if (p.lambda) j["lambda"] = *p.lambda;
    if (p.beta) j["beta"] = *p.beta;
    if (p.m_norm) j["m_norm"] = *p.m_norm;
    if (p.distance) j["distance"] = *p.distance;
    if (p.differentiable) j["differentiable"] = *p.differentiable;
    if (p.deterministic_point) j["deterministic_point"] = *p.deterministic_point;
    if (p.note) j["note"] = *p.note;
    return j;
}

}  // namespace

void write_jsonl(std::ostream& out, const Trace& trace) {
    nlohmann::ordered_json header;
    header["trace_header"] = true;
    header["library_version"] = std::string(kVersion);
    header["rng"] = std::string(RngStream::identity);
    header["oracle_id"] = trace.oracle_id;
    header["seed"] = trace.seed;
    header["stream"] = trace.stream;
    header["level"] = std::string(to_string(trace.level));
    out << header.dump() << '\n';
    for (const auto& e : trace.events) {
        nlohmann::ordered_json j;
        j["kind"] = std::string(to_string(e.kind));
        j["t"] = e.t;
        j["k"] = e.k;
        j["calls"] = e.call_index;
        j["payload"] = payload_json(e.payload);
        out << j.dump() << '\n';
    }
}

}  // namespace pingd
