#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "relbc/photonics.hpp"

namespace relbc {

struct SecurityParams {
    std::uint32_t n_tol = 107;
    double e_tol = 0.015;
    double eps_rect = 0.0021;
    double eps_diag = 0.0021;
    double mu = 0.183;
    double intensity_fluctuation = 0.10;

    void validate() const;
};

struct BindingBound {
    double eps_b = 0.0;
    double delta_star = 0.0;
    // diagnostic split of the minimized expression:
    //   eps_b = (entropy_term + exponential_term) * combinatorial_factor + eps_rect + eps_diag
    double entropy_term = 0.0;
    double exponential_term = 0.0;
    double combinatorial_factor = 1.0;
};

struct EstimationResult {
    std::uint32_t n_rect = 0;
    std::uint32_t n_diag = 0;
    double p_multi = 0.0;
    double delta_multi_rect = 0.0;
    double delta_multi_diag = 0.0;
    std::uint32_t n_e_rect = 0;
    std::uint32_t n_e_diag = 0;
    // observed counts the bounds were computed from
    std::uint32_t n_sent_rect = 0;
    std::uint32_t n_sent_diag = 0;
    std::uint32_t n_detect_rect = 0;
    std::uint32_t n_detect_diag = 0;
};

enum class VerdictReason : std::uint8_t { ok, mismatch, insufficient_singles, excessive_errors };
const char* to_string(VerdictReason r);

struct VerificationVerdict {
    bool accepted = false;
    std::optional<int> deduced_bit;
    VerdictReason reason = VerdictReason::mismatch;
    bool ambiguous = false;  // both bit values passed; rejected and flagged
    EstimationResult estimation;
    double t_commit_upper = 0.0;
    bool a0_excluded = false;
    bool a1_excluded = false;
};

// Binary Shannon entropy in bits, h(0) = h(1) = 0. Domain error outside [0,1].
double binary_entropy(double x);

// Multi-photon probability of a phase-randomized weak coherent pulse with
// worst-case intensity fluctuation: 1 - [1 + mu(1+delta)] e^{-mu(1+delta)}.
double p_multi_bound(double mu, double delta_int);

// Kullback-Leibler divergence between Bernoulli(x) and Bernoulli(y), nats.
// Domain error on boundary arguments.
double kl_divergence(double x, double y);

// Inverts eps = exp(-D(p + dm || p) N) for dm by bisection (D is strictly
// increasing in dm). Returns 0 for eps >= 1; throws when no dm < 1-p reaches
// the target.
double solve_delta_multi(double p_multi, std::uint64_t n_sent, double eps_target);

// Single-photon detection lower bound: max(0, n_detect - ceil(n_sent (p + dm))).
std::uint32_t estimate_n_single(std::uint64_t n_detect, std::uint64_t n_sent, double p_multi,
                                double delta_m);

// Combinatorial factor 1 + sum_{k=1}^{cutoff} (2^k - 1) C(n, k). comb_factor
// evaluates exactly in big integers for n <= 1024 (rounded on conversion to
// double); log_comb_factor is the log-domain evaluation used inside the bound
// so the product with the exponentially small bracket never overflows.
double comb_factor(std::uint32_t n, std::uint32_t cutoff);
double log_comb_factor(std::uint32_t n, std::uint32_t cutoff);

// Binding security bound: infimum over delta in (E_tol, 1/2) of
//   { [1 - X] 2^{1-[1-h(delta)] N_tol} + 2 X } [1 + sum (2^k-1) C(N_tol,k)]
//     + eps_rect + eps_diag,   X = exp((delta N_tol - floor(E_tol N_tol))^2 / (1 - N_tol)),
// located on a 10^4-point grid and refined by golden section to 1e-6 in delta.
// Requires n_tol >= 2.
BindingBound epsilon_b_bound(const SecurityParams& params);

// Revealed measurement outcomes: bit per detected pulse index, index-sorted.
struct Declaration {
    std::vector<std::uint32_t> indices;
    std::vector<std::uint8_t> bits;

    bool operator==(const Declaration&) const = default;
};

// Mismatches between Bob's prepared bits and the revealed bits over the
// detected indices, bucketed by Bob's preparation basis. No multi-photon
// subtraction: worst case charges every error to the single-photon pool.
// Throws std::runtime_error when the declaration does not cover exactly the
// reported detected indices.
std::pair<std::uint32_t, std::uint32_t> count_errors(std::span<const PulseRecord> bob_pulses,
                                                     const Declaration& revealed,
                                                     std::span<const std::uint32_t> reported_detected);

struct VerifyInputs {
    std::span<const PulseRecord> bob_pulses;
    std::span<const std::uint32_t> reported_detected;
    Declaration from_a0;
    Declaration from_a1;
    bool estimation_enabled = true;
    double t_commit_upper = 0.0;
    bool a0_excluded = false;
    bool a1_excluded = false;
};

// Bob's verification: reject on A0/A1 disagreement, estimate the per-basis
// single-photon lower bounds, accept bit 0 (1) only when both bounds clear
// N_tol and the rectilinear (diagonal) error count stays within E_tol N_tol.
// A declaration consistent with both bit values is rejected and flagged
// ambiguous.
VerificationVerdict verify(const SecurityParams& params, const VerifyInputs& in);

}  // namespace relbc
