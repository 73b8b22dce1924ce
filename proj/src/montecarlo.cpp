#include "patmat/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "patmat/errors.hpp"
#include "patmat/parallel.hpp"
#include "patmat/rng.hpp"

namespace patmat {

namespace {

bool needs_even_power(EnsembleKind kind) {
    return kind == EnsembleKind::ReverseCirculant || kind == EnsembleKind::Hankel;
}

bool uses_dense_trace(EnsembleKind kind) { return kind == EnsembleKind::Hankel; }

void check_run_budget(const ExperimentConfig& config, int p) {
    double per_replicate;
    if (uses_dense_trace(config.kind)) {
        double nd = static_cast<double>(config.n);
        per_replicate = nd * nd * nd;
    } else {
        double nd = static_cast<double>(config.n);
        per_replicate = 32.0 * nd * (std::log2(nd) + 1.0) * p;
    }
    if (per_replicate * static_cast<double>(config.replicates) > 2.0e11) {
        throw ResourceError("replication budget exceeded for this n/p combination");
    }
}

} // namespace

int schedule_p(EnsembleKind kind, Eigen::Index n, double coefficient) {
    int p = 2;
    double nd = static_cast<double>(n);
    if (nd > std::exp(1.0)) {
        double raw = coefficient * std::log(nd) / std::log(std::log(nd));
        if (raw > 2.0) {
            p = static_cast<int>(std::floor(raw));
        }
    }
    if (needs_even_power(kind) && p % 2 == 1) {
        ++p;
    }
    return p;
}

int effective_p(const ExperimentConfig& config) {
    return config.growing_p ? schedule_p(config.kind, config.n) : config.p;
}

std::vector<TraceSample> run_replicates(const ExperimentConfig& config) {
    if (config.n < 1) {
        throw InvalidDimensionError("dimension n must be >= 1");
    }
    if (config.replicates < 1) {
        throw InvalidArgumentError("replicates must be >= 1");
    }
    int p = effective_p(config);
    if (p < 1) {
        throw InvalidArgumentError("power p must be >= 1");
    }
    if (needs_even_power(config.kind) && p % 2 == 1) {
        throw InvalidArgumentError(kind_name(config.kind) +
                                   " trace statistics need an even power p");
    }
    check_run_budget(config, p);

    std::vector<TraceSample> samples(static_cast<std::size_t>(config.replicates));
    parallel_for(static_cast<std::size_t>(config.replicates), [&](std::size_t r) {
        std::uint64_t stream = derive_stream(config.seed, static_cast<std::uint64_t>(r));
        MatrixRealization real = make_realization(config.kind, config.n, stream);
        samples[r] = trace_power(real, p);
    });
    return samples;
}

void MomentAccumulator::add(double x) {
    long long n1 = count;
    count += 1;
    double delta = x - mean;
    double delta_n = delta / static_cast<double>(count);
    double delta_n2 = delta_n * delta_n;
    double term1 = delta * delta_n * static_cast<double>(n1);
    mean += delta_n;
    m4 += term1 * delta_n2 *
              (static_cast<double>(count) * static_cast<double>(count) -
               3.0 * static_cast<double>(count) + 3.0) +
          6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
    m3 += term1 * delta_n * (static_cast<double>(count) - 2.0) - 3.0 * delta_n * m2;
    m2 += term1;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.count == 0) {
        return;
    }
    if (count == 0) {
        *this = other;
        return;
    }
    double na = static_cast<double>(count);
    double nb = static_cast<double>(other.count);
    double total = na + nb;
    double delta = other.mean - mean;
    double delta2 = delta * delta;

    double m2_new = m2 + other.m2 + delta2 * na * nb / total;
    double m3_new = m3 + other.m3 + delta * delta2 * na * nb * (na - nb) / (total * total) +
                    3.0 * delta * (na * other.m2 - nb * m2) / total;
    double m4_new = m4 + other.m4 +
                    delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) /
                        (total * total * total) +
                    6.0 * delta2 * (na * na * other.m2 + nb * nb * m2) / (total * total) +
                    4.0 * delta * (na * other.m3 - nb * m3) / total;

    mean += delta * nb / total;
    m2 = m2_new;
    m3 = m3_new;
    m4 = m4_new;
    count += other.count;
}

double MomentAccumulator::variance_unbiased() const {
    if (count < 2) {
        throw DegenerateStatisticsError("variance needs at least two samples");
    }
    return m2 / static_cast<double>(count - 1);
}

double MomentAccumulator::skewness() const {
    if (count < 2 || m2 <= 0.0) {
        throw DegenerateStatisticsError("skewness needs dispersed samples");
    }
    double nd = static_cast<double>(count);
    double variance = m2 / nd;
    return (m3 / nd) / std::pow(variance, 1.5);
}

double MomentAccumulator::excess_kurtosis() const {
    if (count < 2 || m2 <= 0.0) {
        throw DegenerateStatisticsError("kurtosis needs dispersed samples");
    }
    double nd = static_cast<double>(count);
    double variance = m2 / nd;
    return (m4 / nd) / (variance * variance) - 3.0;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> samples) {
    if (samples.empty()) {
        throw DegenerateStatisticsError("empty sample for the KS statistic");
    }
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double phi = normal_cdf(samples[i]);
        double above = static_cast<double>(i + 1) / n - phi;
        double below = phi - static_cast<double>(i) / n;
        d = std::max(d, std::max(above, below));
    }
    return d;
}

LimitValue limit_for_experiment(EnsembleKind kind, int p) {
    switch (kind) {
    case EnsembleKind::Circulant:
        return limit_var_circulant(p);
    case EnsembleKind::SymmetricCirculant:
        return limit_var_symmetric_circulant(p);
    case EnsembleKind::ReverseCirculant:
        if (p % 2 != 0) {
            throw UnsupportedLimitError("reverse-circulant limits cover even powers only");
        }
        return limit_var_reverse_circulant(p / 2);
    case EnsembleKind::Hankel:
        throw UnsupportedLimitError("no in-scope closed form for the Hankel limit");
    }
    throw InvalidArgumentError("unknown ensemble kind");
}

CltReport summarize(const std::vector<TraceSample>& samples, const ExperimentConfig& config) {
    if (samples.size() < 2) {
        throw DegenerateStatisticsError("summaries need at least two samples");
    }
    CltReport report;
    report.config = config;
    report.p = effective_p(config);

    // Two passes in replicate order: the result is independent of how the
    // replication itself was scheduled.
    double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (const TraceSample& s : samples) {
        mean += s.value;
    }
    mean /= n;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (const TraceSample& s : samples) {
        double d = s.value - mean;
        double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if (m2 <= 0.0) {
        throw DegenerateStatisticsError("all samples identical; no dispersion to standardize");
    }

    report.sample_mean = mean;
    report.sample_variance = m2 / (n - 1.0);
    double variance_population = m2 / n;
    report.skewness = (m3 / n) / std::pow(variance_population, 1.5);
    report.excess_kurtosis = (m4 / n) / (variance_population * variance_population) - 3.0;
    report.variance_ratio =
        report.sample_variance / std::pow(static_cast<double>(config.n), report.p + 1);

    try {
        LimitValue limit = limit_for_experiment(config.kind, report.p);
        report.limit_ratio = limit.value;
        report.relative_gap = std::abs(report.variance_ratio - limit.value) / limit.value;
    } catch (const UnsupportedLimitError&) {
        // No closed form; the ratio columns stay empty.
    }

    double sd = std::sqrt(report.sample_variance);
    std::vector<double> standardized;
    standardized.reserve(samples.size());
    for (const TraceSample& s : samples) {
        standardized.push_back((s.value - mean) / sd);
    }
    report.ks_statistic = ks_statistic(std::move(standardized));

    if (samples.size() < 100) {
        report.note = "fewer than 100 replicates; diagnostics are noisy";
    }
    return report;
}

VarianceTable variance_convergence(EnsembleKind kind, int p, std::vector<Eigen::Index> n_grid,
                                   Eigen::Index replicates, std::uint64_t seed) {
    if (n_grid.empty()) {
        throw InvalidArgumentError("empty n grid");
    }
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
        if (n_grid[i] <= n_grid[i - 1]) {
            throw InvalidArgumentError("n grid must be strictly ascending");
        }
    }
    if (replicates < 2) {
        throw InvalidArgumentError("variance estimation needs at least two replicates");
    }
    if (kind == EnsembleKind::ReverseCirculant && p % 2 != 0) {
        throw InvalidArgumentError("reverse-circulant variance runs need an even power p");
    }

    VarianceTable table;
    table.kind = kind;
    table.p = p;
    table.rows.reserve(n_grid.size());

    std::optional<double> limit;
    std::optional<double> limit_alt;
    try {
        limit = limit_for_experiment(kind, p).value;
    } catch (const UnsupportedLimitError&) {
    }
    if (kind == EnsembleKind::SymmetricCirculant && p % 2 == 0) {
        double alt = limit_var_symmetric_circulant(p, ScEvenScaling::SingleExponent).value;
        limit_alt = alt;
    }

    for (Eigen::Index n : n_grid) {
        ExperimentConfig config;
        config.kind = kind;
        config.n = n;
        config.p = p;
        config.replicates = replicates;
        config.seed = derive_stream(seed, static_cast<std::uint64_t>(n));
        std::vector<TraceSample> samples = run_replicates(config);

        double count = static_cast<double>(samples.size());
        double mean = 0.0;
        for (const TraceSample& s : samples) {
            mean += s.value;
        }
        mean /= count;
        double m2 = 0.0;
        for (const TraceSample& s : samples) {
            double d = s.value - mean;
            m2 += d * d;
        }
        double variance = m2 / (count - 1.0);

        VarianceRow row;
        row.n = n;
        row.variance_ratio = variance / std::pow(static_cast<double>(n), p + 1);
        if (limit) {
            row.limit_ratio = *limit;
            row.relative_gap = std::abs(row.variance_ratio - *limit) / *limit;
        }
        if (limit_alt) {
            row.limit_ratio_alt = *limit_alt;
            row.relative_gap_alt = std::abs(row.variance_ratio - *limit_alt) / *limit_alt;
        }
        table.rows.push_back(row);
    }

    table.gaps_decreasing = limit.has_value() && table.rows.size() >= 2;
    if (limit) {
        for (std::size_t i = 1; i < table.rows.size(); ++i) {
            if (*table.rows[i].relative_gap > *table.rows[i - 1].relative_gap) {
                table.gaps_decreasing = false;
                break;
            }
        }
    }
    return table;
}

LowerBoundCheck lower_bound_check(EnsembleKind kind, Eigen::Index n, int p,
                                  double variance_estimate, double standard_error) {
    if (n < 1) {
        throw InvalidDimensionError("dimension n must be >= 1");
    }
    LowerBoundCheck check;
    if (p < 2) {
        check.note = "bounds are stated for p >= 2; trivially passed";
        return check;
    }
    double nd = static_cast<double>(n);
    double pd = static_cast<double>(p);
    if (kind == EnsembleKind::Circulant || kind == EnsembleKind::SymmetricCirculant) {
        check.bound = std::pow(nd, pd + 1.0) / std::pow(12.0 * pd, pd);
    } else {
        if (p % 2 != 0) {
            check.note = "bound is stated for even powers; trivially passed";
            return check;
        }
        check.bound = std::pow(nd, pd + 1.0) / std::pow(3.0 * pd, pd + 1.0);
    }
    double slack = 0.0;
    if (standard_error > 0.0 && variance_estimate > 0.0) {
        slack = 3.0 * standard_error / variance_estimate;
    }
    if (variance_estimate >= check.bound * (1.0 - slack)) {
        check.verdict = BoundVerdict::Pass;
        if (n < 16) {
            check.note = "asymptotic bound checked below its stated regime (n < 16)";
        }
    } else {
        check.verdict = BoundVerdict::Flag;
        check.note = "estimate below the asymptotic bound; expected only for small n";
    }
    return check;
}

} // namespace patmat
