#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relbc/geometry.hpp"
#include "relbc/otp.hpp"
#include "relbc/photonics.hpp"
#include "relbc/security.hpp"

namespace relbc {

enum class PartyId : std::uint8_t { Alice, A0, A1, Bob, B0, B1 };
const char* to_string(PartyId p);

enum class PayloadKind : std::uint8_t { PulseBatch, DetectionReport, EncryptedResults, RevealedResults };
const char* to_string(PayloadKind k);

struct TimedMessage {
    PartyId sender = PartyId::Alice;
    PartyId receiver = PartyId::Bob;
    PayloadKind kind = PayloadKind::DetectionReport;
    double send_time = 0.0;     // seconds
    double arrival_time = 0.0;  // send + serialization + distance/(c*speed_factor)
    std::uint64_t payload_bits = 0;
};

// Engine knobs on top of layout/source/detector parameters.
struct ProtocolConfig {
    double t0 = 1.53e-6;              // Bob's first emission after the trigger
    double classical_bitrate = 1e9;   // serialization: payload_bits / bitrate
    double processing_delay = 0.0;    // per-party latency before each send
    double reveal_hold = 0.0;         // extra wait between decrypt and reveal
    double baseline_error = 0.005;    // optical misrouting probability
    std::size_t otp_key_bits = 0;     // pre-shared key length per agent; 0 = one bit per pulse
};

struct CommitmentTranscript {
    ProtocolLayout layout;
    std::vector<PulseRecord> pulses;
    std::vector<DetectionEvent> detections;  // click-time ordered, dropped events included
    int committed_bit = 0;
    std::vector<TimedMessage> messages;      // arrival ordered
    TimingObservations observations;
    double t_unveil = 0.0;
    double basis_choice_time = 0.0;          // instant Alice's basis takes effect
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> reported_detected;  // Alice's public report
    Declaration revealed_a0;                       // what B0 received
    Declaration revealed_a1;                       // what B1 received
};

// Pending delivery; message_index points into the transcript message log.
struct Event {
    double time = 0.0;
    PartyId sender = PartyId::Alice;
    PartyId receiver = PartyId::Bob;
    PayloadKind kind = PayloadKind::DetectionReport;
    std::size_t message_index = 0;
};

// Deterministic event queue: events pop in nondecreasing time order, equal
// times broken by (sender, receiver, payload kind).
class EventQueue {
public:
    void push(const Event& e);
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    Event pop_next();

private:
    std::vector<Event> heap_;
};

struct HonestRunResult {
    CommitmentTranscript transcript;
    VerificationVerdict verdict;
};

// One full honest execution: Bob's pulse trains, Alice's measurement in the
// basis selecting the committed bit, public detection report, OTP-encrypted
// results to both agents, decrypt-and-forward reveal, Bob's verification with
// the measured timing. Deterministic given the seed.
HonestRunResult run_honest_protocol(const ProtocolLayout& layout, const SourceParams& src,
                                    const DetectorModel& det, const SecurityParams& sec,
                                    const ProtocolConfig& cfg, int committed_bit,
                                    std::uint64_t seed);

// Extracts t0 (first emission) and the arrival of the reveal at B0/B1 from a
// completed transcript. Throws when the transcript is missing those events.
TimingObservations measure_timing(const CommitmentTranscript& transcript);

// Line-delimited transcript export, one record per line, times in integer
// nanoseconds (bit-exact replay format).
std::string export_transcript(const CommitmentTranscript& transcript);

}  // namespace relbc
