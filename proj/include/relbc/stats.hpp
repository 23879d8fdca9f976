#pragma once

#include <cstdint>

namespace relbc {

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

// Wilson score interval for a binomial proportion at 95% confidence.
WilsonInterval wilson95(std::uint64_t successes, std::uint64_t trials);

// Upper regularized incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

// Survival function of the chi-square distribution (p-value of a statistic).
double chi_square_pvalue(double statistic, double dof);

}  // namespace relbc
