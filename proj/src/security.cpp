#include "relbc/security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace relbc {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// floor/ceil with a 1e-9 snap so products like E_tol * N_tol that land a hair
// off an integer resolve the way the exact rationals would
std::int64_t floor_snap(double x) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) < 1e-9) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(x));
}

std::int64_t ceil_snap(double x) {
    const double r = std::nearbyint(x);
    if (std::abs(x - r) < 1e-9) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::ceil(x));
}

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_binomial(std::uint32_t n, std::uint32_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

void SecurityParams::validate() const {
    if (n_tol < 1) throw std::invalid_argument("security: n_tol must be >= 1");
    if (!(e_tol >= 0.0) || e_tol >= 0.5)
        throw std::invalid_argument("security: e_tol must lie in [0, 1/2)");
    if (!(eps_rect > 0.0) || eps_rect >= 1.0 || !(eps_diag > 0.0) || eps_diag >= 1.0)
        throw std::invalid_argument("security: eps_rect/eps_diag must lie in (0, 1)");
    if (!(mu > 0.0)) throw std::invalid_argument("security: mu must be positive");
    if (!(intensity_fluctuation >= 0.0) || intensity_fluctuation >= 1.0)
        throw std::invalid_argument("security: intensity_fluctuation must lie in [0, 1)");
}

const char* to_string(VerdictReason r) {
    switch (r) {
        case VerdictReason::ok: return "ok";
        case VerdictReason::mismatch: return "mismatch";
        case VerdictReason::insufficient_singles: return "insufficient_singles";
        case VerdictReason::excessive_errors: return "excessive_errors";
    }
    return "?";
}

double binary_entropy(double x) {
    if (!(x >= 0.0) || x > 1.0) throw std::domain_error("binary_entropy: x outside [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double p_multi_bound(double mu, double delta_int) {
    if (!(mu > 0.0)) return 0.0;
    const double lam = mu * (1.0 + delta_int);
    return 1.0 - (1.0 + lam) * std::exp(-lam);
}

double kl_divergence(double x, double y) {
    if (!(x > 0.0) || x >= 1.0 || !(y > 0.0) || y >= 1.0)
        throw std::domain_error("kl_divergence: arguments must lie in (0, 1)");
    return x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
}

double solve_delta_multi(double p_multi, std::uint64_t n_sent, double eps_target) {
    if (!(p_multi > 0.0) || p_multi >= 1.0)
        throw std::invalid_argument("solve_delta_multi: p_multi must lie in (0, 1)");
    if (n_sent < 1) throw std::invalid_argument("solve_delta_multi: n_sent must be >= 1");
    if (!(eps_target > 0.0)) throw std::invalid_argument("solve_delta_multi: eps_target must be positive");
    if (eps_target >= 1.0) return 0.0;

    const double target = -std::log(eps_target) / static_cast<double>(n_sent);
    const double dm_limit = 1.0 - p_multi;
    // D(p+dm || p) grows to -ln(p) as dm -> 1-p; beyond that no dm reaches eps
    if (target >= -std::log(p_multi))
        throw std::runtime_error("solve_delta_multi: eps_target unreachable for this p_multi");

    double lo = 0.0, hi = dm_limit * (1.0 - 1e-15);
    for (int i = 0; i < 200 && hi - lo > 1e-10 * std::max(lo, 1e-9); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (kl_divergence(p_multi + mid, p_multi) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::uint32_t estimate_n_single(std::uint64_t n_detect, std::uint64_t n_sent, double p_multi,
                                double delta_m) {
    const std::int64_t subtract = ceil_snap(static_cast<double>(n_sent) * (p_multi + delta_m));
    const std::int64_t n = static_cast<std::int64_t>(n_detect) - subtract;
    return n > 0 ? static_cast<std::uint32_t>(n) : 0u;
}

double comb_factor(std::uint32_t n, std::uint32_t cutoff) {
    cutoff = std::min(cutoff, n);
    if (n <= 1024) {
        namespace mp = boost::multiprecision;
        mp::cpp_int total = 1;
        mp::cpp_int binom = 1;  // C(n, k), updated incrementally
        mp::cpp_int pow2 = 1;
        for (std::uint32_t k = 1; k <= cutoff; ++k) {
            binom = binom * (n - k + 1) / k;
            pow2 <<= 1;
            total += (pow2 - 1) * binom;
        }
        return total.convert_to<double>();
    }
    return std::exp(log_comb_factor(n, cutoff));
}

double log_comb_factor(std::uint32_t n, std::uint32_t cutoff) {
    cutoff = std::min(cutoff, n);
    double acc = 0.0;  // log of the leading 1
    for (std::uint32_t k = 1; k <= cutoff; ++k) {
        const double term = k * kLn2 + std::log1p(-std::pow(2.0, -static_cast<double>(k))) +
                            log_binomial(n, k);
        acc = log_sum_exp(acc, term);
    }
    return acc;
}

BindingBound epsilon_b_bound(const SecurityParams& params) {
    params.validate();
    if (params.n_tol < 2) throw std::invalid_argument("epsilon_b_bound: n_tol must be >= 2");

    const double n = params.n_tol;
    const auto m = static_cast<double>(floor_snap(params.e_tol * n));
    const double log_factor = log_comb_factor(params.n_tol, static_cast<std::uint32_t>(m));

    // log of the bracketed two-term expression at a given delta
    const auto bracket_log = [&](double delta) {
        const double serfling = (delta * n - m) * (delta * n - m) / (1.0 - n);  // < 0
        const double entropy = std::log1p(-std::exp(serfling)) +
                               (1.0 - (1.0 - binary_entropy(delta)) * n) * kLn2;
        const double tail = kLn2 + serfling;
        return log_sum_exp(entropy, tail);
    };
    const auto eval = [&](double delta) {
        return std::exp(bracket_log(delta) + log_factor) + params.eps_rect + params.eps_diag;
    };

    const double lo_edge = params.e_tol + 1e-6;
    const double hi_edge = 0.5 - 1e-6;
    constexpr int kGrid = 10000;
    double best_delta = lo_edge, best = eval(lo_edge);
    for (int i = 1; i <= kGrid; ++i) {
        const double delta = lo_edge + (hi_edge - lo_edge) * i / kGrid;
        const double v = eval(delta);
        if (v < best) {
            best = v;
            best_delta = delta;
        }
    }

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::max(lo_edge, best_delta - (hi_edge - lo_edge) / kGrid);
    double hi = std::min(hi_edge, best_delta + (hi_edge - lo_edge) / kGrid);
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = eval(x1), f2 = eval(x2);
    while (hi - lo > 1e-6) {
        if (f1 > f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = eval(x1);
        }
    }
    const double refined = 0.5 * (lo + hi);
    if (eval(refined) < best) {
        best = eval(refined);
        best_delta = refined;
    }

    BindingBound out;
    out.delta_star = best_delta;
    out.eps_b = best;
    const double serfling =
        (best_delta * n - m) * (best_delta * n - m) / (1.0 - n);
    const double x = std::exp(serfling);
    out.exponential_term = 2.0 * x;
    out.entropy_term = (1.0 - x) * std::exp((1.0 - (1.0 - binary_entropy(best_delta)) * n) * kLn2);
    out.combinatorial_factor = comb_factor(params.n_tol, static_cast<std::uint32_t>(m));
    return out;
}

std::pair<std::uint32_t, std::uint32_t> count_errors(std::span<const PulseRecord> bob_pulses,
                                                     const Declaration& revealed,
                                                     std::span<const std::uint32_t> reported_detected) {
    if (revealed.indices.size() != revealed.bits.size())
        throw std::runtime_error("count_errors: malformed declaration");
    if (revealed.indices.size() != reported_detected.size() ||
        !std::equal(revealed.indices.begin(), revealed.indices.end(), reported_detected.begin()))
        throw std::runtime_error("count_errors: declaration does not cover the reported detections");

    std::uint32_t e_rect = 0, e_diag = 0;
    for (std::size_t i = 0; i < revealed.indices.size(); ++i) {
        const std::uint32_t idx = revealed.indices[i];
        if (idx >= bob_pulses.size())
            throw std::runtime_error("count_errors: declaration references an unknown pulse index");
        const PulseRecord& pulse = bob_pulses[idx];
        if (revealed.bits[i] != pulse.bit) {
            if (pulse.basis == Basis::rect)
                ++e_rect;
            else
                ++e_diag;
        }
    }
    return {e_rect, e_diag};
}

VerificationVerdict verify(const SecurityParams& params, const VerifyInputs& in) {
    params.validate();
    VerificationVerdict v;
    v.t_commit_upper = in.t_commit_upper;
    v.a0_excluded = in.a0_excluded;
    v.a1_excluded = in.a1_excluded;

    if (!(in.from_a0 == in.from_a1)) {
        v.reason = VerdictReason::mismatch;
        return v;
    }

    EstimationResult& est = v.estimation;
    for (const PulseRecord& p : in.bob_pulses)
        (p.basis == Basis::rect ? est.n_sent_rect : est.n_sent_diag)++;
    for (std::uint32_t idx : in.reported_detected) {
        if (idx >= in.bob_pulses.size())
            throw std::runtime_error("verify: reported detection references an unknown pulse index");
        (in.bob_pulses[idx].basis == Basis::rect ? est.n_detect_rect : est.n_detect_diag)++;
    }
    est.p_multi = p_multi_bound(params.mu, params.intensity_fluctuation);
    if (in.estimation_enabled) {
        est.delta_multi_rect =
            est.n_sent_rect > 0 ? solve_delta_multi(est.p_multi, est.n_sent_rect, params.eps_rect) : 0.0;
        est.delta_multi_diag =
            est.n_sent_diag > 0 ? solve_delta_multi(est.p_multi, est.n_sent_diag, params.eps_diag) : 0.0;
        est.n_rect = estimate_n_single(est.n_detect_rect, est.n_sent_rect, est.p_multi,
                                       est.delta_multi_rect);
        est.n_diag = estimate_n_single(est.n_detect_diag, est.n_sent_diag, est.p_multi,
                                       est.delta_multi_diag);
    } else {
        est.n_rect = est.n_detect_rect;
        est.n_diag = est.n_detect_diag;
    }

    const auto [e_rect, e_diag] = count_errors(in.bob_pulses, in.from_a0, in.reported_detected);
    est.n_e_rect = e_rect;
    est.n_e_diag = e_diag;

    if (est.n_rect < params.n_tol || est.n_diag < params.n_tol) {
        v.reason = VerdictReason::insufficient_singles;
        return v;
    }
    const double error_budget = params.e_tol * static_cast<double>(params.n_tol) + 1e-9;
    const bool pass0 = static_cast<double>(e_rect) <= error_budget;
    const bool pass1 = static_cast<double>(e_diag) <= error_budget;
    if (pass0 && pass1) {
        // consistent with both commitments; never silently pick one
        v.reason = VerdictReason::mismatch;
        v.ambiguous = true;
        return v;
    }
    if (!pass0 && !pass1) {
        v.reason = VerdictReason::excessive_errors;
        return v;
    }
    v.accepted = true;
    v.reason = VerdictReason::ok;
    v.deduced_bit = pass0 ? 0 : 1;
    return v;
}

}  // namespace relbc
