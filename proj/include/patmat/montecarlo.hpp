#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "patmat/limits.hpp"
#include "patmat/spectra.hpp"

namespace patmat {

/// Slowly growing power schedule p(n) = max(2, floor(c * ln n / ln ln n)),
/// rounded up to even for the kinds whose trace statistics need even powers.
[[nodiscard]] int schedule_p(EnsembleKind kind, Eigen::Index n, double coefficient = 0.5);

struct ExperimentConfig {
    EnsembleKind kind = EnsembleKind::Circulant;
    Eigen::Index n = 1;
    int p = 1;
    Eigen::Index replicates = 1;
    std::uint64_t seed = 0;
    bool growing_p = false; // replaces p by schedule_p(kind, n)
};

/// Effective trace power of a run (the schedule output when growing_p).
[[nodiscard]] int effective_p(const ExperimentConfig& config);

/// Seeded replicated traces. Replicate r draws its input stream from
/// (seed, r); the output is ordered by r no matter how work is scheduled.
[[nodiscard]] std::vector<TraceSample> run_replicates(const ExperimentConfig& config);

/// Streaming central-moment accumulator with an order-independent merge, for
/// partitioned reductions.
struct MomentAccumulator {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x);
    void merge(const MomentAccumulator& other);

    [[nodiscard]] double variance_unbiased() const;
    [[nodiscard]] double skewness() const;
    [[nodiscard]] double excess_kurtosis() const;
};

/// Empirical distance sup_x |F_hat(x) - Phi(x)| to the standard normal.
[[nodiscard]] double ks_statistic(std::vector<double> samples);

[[nodiscard]] double normal_cdf(double x);

/// The closed-form variance limit backing an experiment, when one exists.
/// p is the matrix power. Throws UnsupportedLimitError for Hankel and for
/// odd reverse-circulant powers.
[[nodiscard]] LimitValue limit_for_experiment(EnsembleKind kind, int p);

struct CltReport {
    ExperimentConfig config;
    int p = 1; // effective power
    double sample_mean = 0.0;
    double sample_variance = 0.0;
    double variance_ratio = 0.0; // sample_variance / n^(p+1)
    std::optional<double> limit_ratio;
    std::optional<double> relative_gap;
    double ks_statistic = 0.0; // of the standardized samples
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    std::optional<std::string> note; // soft warnings, e.g. small sample size
};

/// Moments, variance ratio and normality diagnostics of a replicate batch.
/// Standardization uses the sample mean and standard deviation.
[[nodiscard]] CltReport summarize(const std::vector<TraceSample>& samples,
                                  const ExperimentConfig& config);

struct VarianceRow {
    Eigen::Index n = 0;
    double variance_ratio = 0.0;
    std::optional<double> limit_ratio;
    std::optional<double> relative_gap;
    // Second reading of the even-power symmetric-circulant closed form.
    std::optional<double> limit_ratio_alt;
    std::optional<double> relative_gap_alt;
};

struct VarianceTable {
    EnsembleKind kind = EnsembleKind::Circulant;
    int p = 1;
    std::vector<VarianceRow> rows;
    bool gaps_decreasing = false;
};

/// Variance-ratio convergence along an ascending n grid, with the gap to the
/// closed-form limit where one exists.
[[nodiscard]] VarianceTable variance_convergence(EnsembleKind kind, int p,
                                                 std::vector<Eigen::Index> n_grid,
                                                 Eigen::Index replicates, std::uint64_t seed);

enum class BoundVerdict { Pass, Flag };

struct LowerBoundCheck {
    BoundVerdict verdict = BoundVerdict::Pass;
    double bound = 0.0;
    std::string note;
};

/// Checks a variance estimate against the finite-n lower bounds
/// n^(p+1)/(12p)^p (circulant family) and n^(p+1)/(3p)^(p+1) (reverse
/// circulant and Hankel, even p). Estimates below the bound are flagged, not
/// failed, since the bounds are asymptotic.
[[nodiscard]] LowerBoundCheck lower_bound_check(EnsembleKind kind, Eigen::Index n, int p,
                                                double variance_estimate,
                                                double standard_error = 0.0);

} // namespace patmat
