#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "patmat/errors.hpp"
#include "patmat/rng.hpp"

namespace patmat {

enum class EnsembleKind {
    Circulant,
    SymmetricCirculant,
    ReverseCirculant,
    Hankel,
};

[[nodiscard]] std::string kind_name(EnsembleKind kind);
[[nodiscard]] EnsembleKind parse_kind(const std::string& name);

/// Length of the input sequence feeding an n x n matrix of the given kind:
/// n for circulant and reverse circulant, floor(n/2)+1 for symmetric
/// circulant, 2n-1 for Hankel.
[[nodiscard]] Eigen::Index required_input_length(EnsembleKind kind, Eigen::Index n);

/// One sampled input sequence together with the seed that regenerates it.
struct InputSequence {
    Eigen::VectorXd values;
    std::uint64_t seed = 0;

    [[nodiscard]] Eigen::Index length() const { return values.size(); }
};

struct MatrixRealization {
    EnsembleKind kind = EnsembleKind::Circulant;
    Eigen::Index n = 0;
    InputSequence input;
};

/// Draws the i.i.d. standard-normal input sequence for an n x n matrix.
/// Deterministic in (kind, n, seed).
[[nodiscard]] InputSequence sample_input(EnsembleKind kind, Eigen::Index n, std::uint64_t seed);

[[nodiscard]] MatrixRealization make_realization(EnsembleKind kind, Eigen::Index n,
                                                 std::uint64_t seed);

/// 0-based position in the input sequence holding entry (i, j), 1 <= i,j <= n.
/// This index map is the whole definition of each pattern.
[[nodiscard]] Eigen::Index entry_offset(EnsembleKind kind, Eigen::Index n, Eigen::Index i,
                                        Eigen::Index j);

/// Entry (i, j) of the realized matrix, 1-based indices.
[[nodiscard]] double entry(const MatrixRealization& real, Eigen::Index i, Eigen::Index j);

inline constexpr Eigen::Index kDenseLimit = 4096;

/// Materializes the pattern over an arbitrary coefficient vector.
template <typename Derived>
[[nodiscard]] Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
dense_pattern(EnsembleKind kind, Eigen::Index n, const Eigen::MatrixBase<Derived>& values) {
    using Scalar = typename Derived::Scalar;
    if (n < 1) throw InvalidDimensionError("matrix dimension must be positive");
    if (values.size() != required_input_length(kind, n))
        throw ShapeError("input length does not match the pattern for this dimension");
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
    for (Eigen::Index i = 1; i <= n; ++i)
        for (Eigen::Index j = 1; j <= n; ++j)
            out(i - 1, j - 1) = values[entry_offset(kind, n, i, j)];
    return out;
}

/// Full n x n matrix of a realization; symmetric kinds produce exactly
/// symmetric arrays because symmetric index pairs share one input slot.
[[nodiscard]] Eigen::MatrixXd dense_matrix(const MatrixRealization& real);

/// Entry-pair covariance indicator: entries are unit-variance copies of input
/// slots, so sigma_{ij,kl} is 1 exactly when both entries read the same slot.
struct CovarianceStructure {
    EnsembleKind kind = EnsembleKind::Circulant;
    Eigen::Index n = 0;

    [[nodiscard]] int sigma(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l) const {
        return entry_offset(kind, n, i, j) == entry_offset(kind, n, k, l) ? 1 : 0;
    }
};

/// Largest row sum of the n^2 x n^2 entry-covariance matrix, by direct
/// enumeration. Bounded by n for circulant, reverse circulant and Hankel and
/// by 2n for symmetric circulant.
[[nodiscard]] Eigen::Index covariance_row_sum_max(EnsembleKind kind, Eigen::Index n);

} // namespace patmat
