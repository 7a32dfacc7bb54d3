#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bqs/bits.h"

namespace bqs {

/// One line of a transcript. Rounds are non-decreasing within a transcript;
/// several events may share a round (a message and the bound that precedes
/// it, for instance).
struct TranscriptEvent {
  std::uint64_t trial = 0;
  std::uint64_t round = 0;
  std::string channel;  // Comm, Q-Comm, Memory, Ideal, Input, Output, Control
  std::string dir;      // A->B, B->A, A, B, env, ...
  std::string payload_hex;
  std::string event;

  bool operator==(const TranscriptEvent &) const = default;
};

/// Ordered record of a run: classical payloads bit-exact, quantum messages
/// as handles plus qubit counts, memory-bound events with the bits that the
/// forced measurement produced.
///
/// Also tracks which protocol is active. Sub-protocols run one at a time:
/// a protocol may only start as the child of the innermost active one.
class Transcript {
 public:
  explicit Transcript(std::uint64_t trial = 0) : trial_(trial) {}

  std::uint64_t trial() const { return trial_; }
  std::uint64_t round() const { return round_; }
  void next_round() { ++round_; }

  void record(const std::string &channel, const std::string &dir, const BitString &payload,
              const std::string &event);
  void record(const std::string &channel, const std::string &dir, const std::string &event);
  /// A new quantum-message handle, unique within this transcript.
  std::uint64_t new_handle() { return ++handles_; }

  /// Starts `name` nested in `parent` ("" for top level). Throws
  /// ConcurrencyViolation unless `parent` is the innermost active protocol.
  void begin_phase(const std::string &name, const std::string &parent = "");
  /// Throws ConcurrencyViolation unless `name` is the innermost active one.
  void end_phase(const std::string &name);
  const std::vector<std::string> &active_phases() const { return active_; }

  const std::vector<TranscriptEvent> &events() const { return events_; }
  /// Events whose channel and event text match.
  std::vector<TranscriptEvent> find(const std::string &channel, const std::string &event_prefix = "") const;

  void write_jsonl(std::ostream &out) const;
  std::string to_jsonl() const;

 private:
  std::uint64_t trial_;
  std::uint64_t round_ = 0;
  std::uint64_t handles_ = 0;
  std::vector<std::string> active_;
  std::vector<TranscriptEvent> events_;
};

std::string to_json_line(const TranscriptEvent &e);

/// Parses one JSONL line; throws std::invalid_argument if keys are missing
/// or extra.
TranscriptEvent parse_json_line(const std::string &line);

}  // namespace bqs
