#include "bqs/transcript.h"

#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bqs/errors.h"

namespace bqs {

void Transcript::record(const std::string &channel, const std::string &dir, const BitString &payload,
                        const std::string &event) {
    events_.push_back({trial_, round_, channel, dir, payload.to_hex(), event});
}

void Transcript::record(const std::string &channel, const std::string &dir, const std::string &event) {
    events_.push_back({trial_, round_, channel, dir, "", event});
}

void Transcript::begin_phase(const std::string &name, const std::string &parent) {
    std::string innermost = active_.empty() ? "" : active_.back();
    if (innermost != parent) {
        throw ConcurrencyViolation("cannot start '" + name + "' inside '" + parent + "' while '" + innermost +
                                   "' is active");
    }
    active_.push_back(name);
    record("Control", "", "begin " + name);
}

void Transcript::end_phase(const std::string &name) {
    if (active_.empty() || active_.back() != name) {
        throw ConcurrencyViolation("cannot end '" + name + "': it is not the innermost active protocol");
    }
    active_.pop_back();
    record("Control", "", "end " + name);
}

std::vector<TranscriptEvent> Transcript::find(const std::string &channel, const std::string &event_prefix) const {
    std::vector<TranscriptEvent> out;
    for (const auto &e : events_) {
        if (e.channel == channel && e.event.compare(0, event_prefix.size(), event_prefix) == 0) {
            out.push_back(e);
        }
    }
    return out;
}

std::string to_json_line(const TranscriptEvent &e) {
    nlohmann::ordered_json j;
    j["trial"] = e.trial;
    j["round"] = e.round;
    j["channel"] = e.channel;
    j["dir"] = e.dir;
    j["payload_hex"] = e.payload_hex;
    j["event"] = e.event;
    return j.dump();
}

TranscriptEvent parse_json_line(const std::string &line) {
    auto j = nlohmann::json::parse(line);
    static const std::set<std::string> keys = {"trial", "round", "channel", "dir", "payload_hex", "event"};
    if (!j.is_object() || j.size() != keys.size()) {
        throw std::invalid_argument("transcript line must have exactly the six transcript keys");
    }
    for (const auto &k : keys) {
        if (!j.contains(k)) {
            throw std::invalid_argument("transcript line lacks key " + k);
        }
    }
    TranscriptEvent e;
    e.trial = j["trial"].get<std::uint64_t>();
    e.round = j["round"].get<std::uint64_t>();
    e.channel = j["channel"].get<std::string>();
    e.dir = j["dir"].get<std::string>();
    e.payload_hex = j["payload_hex"].get<std::string>();
    e.event = j["event"].get<std::string>();
    return e;
}

void Transcript::write_jsonl(std::ostream &out) const {
    for (const auto &e : events_) {
        out << to_json_line(e) << '\n';
    }
}

std::string Transcript::to_jsonl() const {
    std::ostringstream out;
    write_jsonl(out);
    return out.str();
}

}  // namespace bqs
