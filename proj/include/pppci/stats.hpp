#ifndef PPPCI_STATS_HPP
#define PPPCI_STATS_HPP

#include "pppci/counts.hpp"
#include "pppci/kernel.hpp"
#include "pppci/sim.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace pppci {

inline constexpr double kSignificance = 0.001;
inline constexpr double kZBand = 4.0;

struct TestReport {
    std::string name;
    std::string statistic_name;
    double statistic = 0;
    int dof = 0;
    std::optional<double> p_value;
    std::optional<double> z_score;
    std::string threshold;  // e.g. "p > 0.001", "|z| < 4"
    bool pass = false;
    bool degenerate = false;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json details = nlohmann::json::object();

    nlohmann::json to_json() const;
};

// Chi-square goodness of fit of one window's counts against Poisson(mean).
// Needs n >= min_replicates; bins are pooled left to right until every bin
// expects >= 5. Throws DomainError when fewer than two bins remain.
TestReport poisson_gof(const CountSample& sample, std::size_t window, double mean,
                       std::size_t min_replicates = 10000);
std::vector<TestReport> poisson_gof(const CountSample& sample, const std::vector<double>& means,
                                    std::size_t min_replicates = 10000);

// Two-sample chi-square on the joint window-count vectors. Each window is
// capped at the 99.5th percentile of the pooled sample with a tail bin; cells
// expecting fewer than 5 in either sample are pooled.
TestReport joint_count_equality(const CountSample& s1, const CountSample& s2,
                                std::size_t min_replicates = 100000);

// Mean and variance of one window's counts within kZBand standard errors of
// the Poisson value `mass`.
TestReport count_law_check(const CountSample& sample, std::size_t window, double mass);

// Sample covariance of two windows within kZBand standard errors of `expected`.
TestReport count_covariance_check(const CountSample& sample, std::size_t w1, std::size_t w2,
                                  double expected = 0.0);

struct CondCovEstimate {
    MomentSummary x, y;
    double cov = 0;
    double cov_stderr = 0;
};

// Resamples (ξ_A, ξ_B) given the frozen ξ_C through the joint kernel rows
// (replicate r, point i uses substream r then i) and compares the empirical
// conditional means and covariance of ξ_A(a_1), ξ_B(a_2) with
// cond_moment_formulas.
TestReport empirical_cond_cov(const ConditionalKernel& kernel, const Rectangle& a_1, const Rectangle& a_2,
                              const PointPattern& xi_c, std::size_t n, std::uint64_t seed);

}  // namespace pppci

#endif
