#include "relbc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "relbc/units.hpp"

namespace relbc {

namespace {

using ordered_json = nlohmann::ordered_json;

std::int64_t ns(double seconds) { return std::llround(seconds * 1e9); }

bool event_after(const Event& a, const Event& b) {
    const auto ka = std::tuple{a.time, static_cast<int>(a.sender), static_cast<int>(a.receiver),
                               static_cast<int>(a.kind)};
    const auto kb = std::tuple{b.time, static_cast<int>(b.sender), static_cast<int>(b.receiver),
                               static_cast<int>(b.kind)};
    return ka > kb;
}

}  // namespace

const char* to_string(PartyId p) {
    switch (p) {
        case PartyId::Alice: return "Alice";
        case PartyId::A0: return "A0";
        case PartyId::A1: return "A1";
        case PartyId::Bob: return "Bob";
        case PartyId::B0: return "B0";
        case PartyId::B1: return "B1";
    }
    return "?";
}

const char* to_string(PayloadKind k) {
    switch (k) {
        case PayloadKind::PulseBatch: return "PulseBatch";
        case PayloadKind::DetectionReport: return "DetectionReport";
        case PayloadKind::EncryptedResults: return "EncryptedResults";
        case PayloadKind::RevealedResults: return "RevealedResults";
    }
    return "?";
}

void EventQueue::push(const Event& e) {
    heap_.push_back(e);
    std::push_heap(heap_.begin(), heap_.end(), event_after);
}

Event EventQueue::pop_next() {
    if (heap_.empty()) throw std::logic_error("event queue underflow");
    std::pop_heap(heap_.begin(), heap_.end(), event_after);
    Event e = heap_.back();
    heap_.pop_back();
    return e;
}

namespace {

// Simulation context shared by the party handlers.
struct Engine {
    const ProtocolLayout& layout;
    const SourceParams& src;
    const DetectorModel& det;
    const SecurityParams& sec;
    const ProtocolConfig& cfg;
    CommitmentTranscript& tr;

    EventQueue queue;
    std::vector<std::uint8_t> plaintext;        // Alice's outcome bits, index order
    std::vector<std::uint8_t> cipher_a0, cipher_a1;
    OneTimePadKey key_a0_alice, key_a0_agent;   // identical bits, independent offsets
    OneTimePadKey key_a1_alice, key_a1_agent;
    RandomStream measure_rng;
    RandomStream fpga_rng;
    double reveal_send_a0 = -1.0, reveal_send_a1 = -1.0;

    Engine(const ProtocolLayout& l, const SourceParams& s, const DetectorModel& d,
           const SecurityParams& se, const ProtocolConfig& c, CommitmentTranscript& t,
           std::uint64_t seed)
        : layout(l), src(s), det(d), sec(se), cfg(c), tr(t),
          measure_rng(mix_seed(seed, 2)), fpga_rng(mix_seed(seed, 3)) {}

    double link_delay(PartyId from, PartyId to) const {
        const auto& sp = layout.speed;
        const auto pair_delay = [](double dist, double factor) {
            return dist / (kSpeedOfLight * factor);
        };
        if ((from == PartyId::Bob && to == PartyId::Alice) ||
            (from == PartyId::Alice && to == PartyId::Bob))
            return pair_delay(layout.d_alice_bob, sp.alice_bob);
        if (from == PartyId::Alice && to == PartyId::A0) return pair_delay(layout.d_alice_a0, sp.alice_a0);
        if (from == PartyId::Alice && to == PartyId::A1) return pair_delay(layout.d_alice_a1, sp.alice_a1);
        if (from == PartyId::A0 && to == PartyId::B0) return pair_delay(layout.d_a0_b0, sp.a0_b0);
        if (from == PartyId::A1 && to == PartyId::B1) return pair_delay(layout.d_a1_b1, sp.a1_b1);
        throw std::logic_error("no channel between these parties");
    }

    // Creates the message record and schedules its delivery.
    void send(PartyId from, PartyId to, PayloadKind kind, double send_time,
              std::uint64_t payload_bits, double extra_transit = 0.0) {
        TimedMessage m;
        m.sender = from;
        m.receiver = to;
        m.kind = kind;
        m.send_time = send_time;
        m.payload_bits = payload_bits;
        const double serialization =
            kind == PayloadKind::PulseBatch
                ? 0.0
                : static_cast<double>(payload_bits) / cfg.classical_bitrate;
        m.arrival_time = send_time + serialization + link_delay(from, to) + extra_transit;
        if (m.arrival_time < m.send_time)
            throw std::logic_error("causality violation: arrival before send");
        tr.messages.push_back(m);
        queue.push(Event{m.arrival_time, from, to, kind, tr.messages.size() - 1});
    }
};

}  // namespace

HonestRunResult run_honest_protocol(const ProtocolLayout& layout, const SourceParams& src,
                                    const DetectorModel& det, const SecurityParams& sec,
                                    const ProtocolConfig& cfg, int committed_bit,
                                    std::uint64_t seed) {
    layout.validate();
    src.validate();
    det.validate();
    sec.validate();
    if (committed_bit != 0 && committed_bit != 1)
        throw std::invalid_argument("committed_bit must be 0 or 1");

    HonestRunResult result;
    CommitmentTranscript& tr = result.transcript;
    tr.layout = layout;
    tr.committed_bit = committed_bit;
    tr.seed = seed;

    Engine eng(layout, src, det, sec, cfg, tr, seed);

    // step 1: pre-shared one-time pads (QKD replaced by seeded key material)
    const std::size_t key_bits = cfg.otp_key_bits ? cfg.otp_key_bits : src.total_pulses();
    {
        RandomStream otp0(mix_seed(seed, 4)), otp1(mix_seed(seed, 5));
        eng.key_a0_alice = make_otp_key(key_bits, otp0);
        eng.key_a0_agent = eng.key_a0_alice;
        eng.key_a1_alice = make_otp_key(key_bits, otp1);
        eng.key_a1_agent = eng.key_a1_alice;
    }

    // step 2: Bob's pulse trains, first emission at t0
    tr.pulses = generate_pulse_train(src, mix_seed(seed, 1), cfg.t0);
    const double train_span = (src.n_pulses - 1) / src.rep_rate;
    eng.send(PartyId::Bob, PartyId::Alice, PayloadKind::PulseBatch, cfg.t0,
             src.total_pulses(), train_span);

    const Basis alice_basis = committed_bit == 0 ? Basis::rect : Basis::diag;
    tr.basis_choice_time = cfg.t0 + eng.link_delay(PartyId::Bob, PartyId::Alice);

    while (!eng.queue.empty()) {
        const Event ev = eng.queue.pop_next();
        switch (ev.kind) {
            case PayloadKind::PulseBatch: {
                // step 3: Alice measures every pulse in her committed basis.
                // The parallel trains feed separate detector pairs, so
                // dead-time bookkeeping runs per train.
                const double prop = eng.link_delay(PartyId::Bob, PartyId::Alice);
                const double gate = 1.0 / src.rep_rate;
                const FpgaPolicy policy = hardened_policy(det);
                for (std::uint32_t train = 0; train < src.n_parallel; ++train) {
                    const std::span<const PulseRecord> slice{
                        tr.pulses.data() + static_cast<std::size_t>(train) * src.n_pulses,
                        src.n_pulses};
                    const auto raw = simulate_detection(slice, alice_basis, det,
                                                        cfg.baseline_error, gate, prop,
                                                        eng.measure_rng);
                    const auto events = postselect_clicks(raw, det, policy, eng.fpga_rng);
                    tr.detections.insert(tr.detections.end(), events.begin(), events.end());
                }
                std::sort(tr.detections.begin(), tr.detections.end(),
                          [](const DetectionEvent& a, const DetectionEvent& b) {
                              return std::tie(a.click_time, a.pulse_index) <
                                     std::tie(b.click_time, b.pulse_index);
                          });
                for (const auto& e : tr.detections)
                    if (e.retained) tr.reported_detected.push_back(e.pulse_index);
                std::sort(tr.reported_detected.begin(), tr.reported_detected.end());
                eng.plaintext.reserve(tr.reported_detected.size());
                for (std::uint32_t idx : tr.reported_detected) {
                    const auto it = std::find_if(tr.detections.begin(), tr.detections.end(),
                                                 [idx](const DetectionEvent& e) {
                                                     return e.retained && e.pulse_index == idx;
                                                 });
                    eng.plaintext.push_back(it->outcome_bit);
                }

                const double t_send = ev.time + cfg.processing_delay;
                eng.send(PartyId::Alice, PartyId::Bob, PayloadKind::DetectionReport, t_send,
                         src.total_pulses());  // detected-index bitmap
                eng.cipher_a0 = otp_encrypt(eng.plaintext, eng.key_a0_alice);
                eng.cipher_a1 = otp_encrypt(eng.plaintext, eng.key_a1_alice);
                eng.send(PartyId::Alice, PartyId::A0, PayloadKind::EncryptedResults, t_send,
                         eng.cipher_a0.size());
                eng.send(PartyId::Alice, PartyId::A1, PayloadKind::EncryptedResults, t_send,
                         eng.cipher_a1.size());
                break;
            }
            case PayloadKind::DetectionReport:
                break;  // Bob archives the report; content lives in the transcript
            case PayloadKind::EncryptedResults: {
                // step 4: the agent decrypts and forwards to unveil
                const bool is_a0 = ev.receiver == PartyId::A0;
                const auto plain = otp_decrypt(is_a0 ? eng.cipher_a0 : eng.cipher_a1,
                                               is_a0 ? eng.key_a0_agent : eng.key_a1_agent);
                Declaration& decl = is_a0 ? tr.revealed_a0 : tr.revealed_a1;
                decl.indices = tr.reported_detected;
                decl.bits = plain;
                const double t_send = ev.time + cfg.processing_delay + cfg.reveal_hold;
                (is_a0 ? eng.reveal_send_a0 : eng.reveal_send_a1) = t_send;
                eng.send(is_a0 ? PartyId::A0 : PartyId::A1, is_a0 ? PartyId::B0 : PartyId::B1,
                         PayloadKind::RevealedResults, t_send, plain.size());
                break;
            }
            case PayloadKind::RevealedResults:
                break;  // B0/B1 arrival times are read back from the message log
        }
    }

    tr.t_unveil = std::min(eng.reveal_send_a0, eng.reveal_send_a1);
    tr.observations = measure_timing(tr);

    // step 5: verification with the measured timing
    const CommitPointSolution sol = solve_commit_point(layout, tr.observations);
    const LocationExclusion excl = location_exclusion(layout, tr.observations);
    VerifyInputs in;
    in.bob_pulses = tr.pulses;
    in.reported_detected = tr.reported_detected;
    in.from_a0 = tr.revealed_a0;
    in.from_a1 = tr.revealed_a1;
    in.t_commit_upper = sol.t_commit_upper;
    in.a0_excluded = excl.a0_excluded;
    in.a1_excluded = excl.a1_excluded;
    result.verdict = verify(sec, in);
    return result;
}

TimingObservations measure_timing(const CommitmentTranscript& tr) {
    if (tr.pulses.empty()) throw std::runtime_error("measure_timing: transcript has no pulses");
    TimingObservations obs;
    obs.t0 = tr.pulses.front().emit_time;
    for (const PulseRecord& p : tr.pulses) obs.t0 = std::min(obs.t0, p.emit_time);

    bool got_b0 = false, got_b1 = false;
    for (const TimedMessage& m : tr.messages) {
        if (m.kind != PayloadKind::RevealedResults) continue;
        if (m.receiver == PartyId::B0) {
            obs.t_b0 = std::max(got_b0 ? obs.t_b0 : m.arrival_time, m.arrival_time);
            got_b0 = true;
        } else if (m.receiver == PartyId::B1) {
            obs.t_b1 = std::max(got_b1 ? obs.t_b1 : m.arrival_time, m.arrival_time);
            got_b1 = true;
        }
    }
    if (!got_b0 || !got_b1)
        throw std::runtime_error("measure_timing: transcript incomplete, reveal missing");
    return obs;
}

std::string export_transcript(const CommitmentTranscript& tr) {
    std::string out;
    {
        ordered_json meta;
        meta["record"] = "meta";
        meta["seed"] = tr.seed;
        meta["committed_bit"] = tr.committed_bit;
        meta["n_pulses"] = tr.pulses.size();
        meta["layout"] = {{"d_alice_bob_m", tr.layout.d_alice_bob},
                          {"d_alice_a0_m", tr.layout.d_alice_a0},
                          {"d_alice_a1_m", tr.layout.d_alice_a1},
                          {"d_a0_b0_m", tr.layout.d_a0_b0},
                          {"d_a1_b1_m", tr.layout.d_a1_b1},
                          {"theta_rad", tr.layout.theta}};
        out += meta.dump();
        out += '\n';
    }
    for (const PulseRecord& p : tr.pulses) {
        ordered_json j;
        j["record"] = "pulse";
        j["index"] = p.index;
        j["basis"] = to_string(p.basis);
        j["bit"] = p.bit;
        j["photons"] = p.photon_number;
        j["emit_ns"] = ns(p.emit_time);
        out += j.dump();
        out += '\n';
    }
    for (const DetectionEvent& e : tr.detections) {
        ordered_json j;
        j["record"] = "detection";
        j["index"] = e.pulse_index;
        j["time_ns"] = ns(e.click_time);
        j["outcome"] = e.outcome_bit;
        j["type"] = to_string(e.raw_click_type);
        j["retained"] = e.retained;
        out += j.dump();
        out += '\n';
    }
    for (const TimedMessage& m : tr.messages) {
        ordered_json j;
        j["record"] = "message";
        j["sender"] = to_string(m.sender);
        j["receiver"] = to_string(m.receiver);
        j["kind"] = to_string(m.kind);
        j["send_ns"] = ns(m.send_time);
        j["arrival_ns"] = ns(m.arrival_time);
        j["bits"] = m.payload_bits;
        out += j.dump();
        out += '\n';
    }
    {
        ordered_json j;
        j["record"] = "timing";
        j["t0_ns"] = ns(tr.observations.t0);
        j["t_b0_ns"] = ns(tr.observations.t_b0);
        j["t_b1_ns"] = ns(tr.observations.t_b1);
        j["t_unveil_ns"] = ns(tr.t_unveil);
        j["basis_choice_ns"] = ns(tr.basis_choice_time);
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace relbc
