#include "patmat/ensembles.hpp"

#include <algorithm>
#include <vector>

namespace patmat {

std::string kind_name(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::Circulant: return "circulant";
        case EnsembleKind::SymmetricCirculant: return "symmetric-circulant";
        case EnsembleKind::ReverseCirculant: return "reverse-circulant";
        case EnsembleKind::Hankel: return "hankel";
    }
    throw InvalidArgumentError("unknown ensemble kind");
}

EnsembleKind parse_kind(const std::string& name) {
    if (name == "circulant") return EnsembleKind::Circulant;
    if (name == "symmetric-circulant") return EnsembleKind::SymmetricCirculant;
    if (name == "reverse-circulant") return EnsembleKind::ReverseCirculant;
    if (name == "hankel") return EnsembleKind::Hankel;
    throw InvalidArgumentError("unknown ensemble kind: " + name);
}

Eigen::Index required_input_length(EnsembleKind kind, Eigen::Index n) {
    if (n < 1) throw InvalidDimensionError("matrix dimension must be positive");
    switch (kind) {
        case EnsembleKind::Circulant:
        case EnsembleKind::ReverseCirculant: return n;
        case EnsembleKind::SymmetricCirculant: return n / 2 + 1;
        case EnsembleKind::Hankel: return 2 * n - 1;
    }
    throw InvalidArgumentError("unknown ensemble kind");
}

InputSequence sample_input(EnsembleKind kind, Eigen::Index n, std::uint64_t seed) {
    const Eigen::Index len = required_input_length(kind, n);
    return InputSequence{gaussian_vector(len, seed), seed};
}

MatrixRealization make_realization(EnsembleKind kind, Eigen::Index n, std::uint64_t seed) {
    return MatrixRealization{kind, n, sample_input(kind, n, seed)};
}

Eigen::Index entry_offset(EnsembleKind kind, Eigen::Index n, Eigen::Index i, Eigen::Index j) {
    if (i < 1 || i > n || j < 1 || j > n) throw IndexError("entry index out of range");
    switch (kind) {
        case EnsembleKind::Circulant: return ((j - i) % n + n) % n;
        case EnsembleKind::ReverseCirculant: return (i + j - 2) % n;
        case EnsembleKind::Hankel: return i + j - 2;
        case EnsembleKind::SymmetricCirculant: {
            const Eigen::Index d = std::abs(i - j);
            return std::min(d, n - d);
        }
    }
    throw InvalidArgumentError("unknown ensemble kind");
}

double entry(const MatrixRealization& real, Eigen::Index i, Eigen::Index j) {
    return real.input.values[entry_offset(real.kind, real.n, i, j)];
}

Eigen::MatrixXd dense_matrix(const MatrixRealization& real) {
    if (real.n > kDenseLimit) throw ResourceError("dimension exceeds the dense materialization limit");
    return dense_pattern(real.kind, real.n, real.input.values);
}

Eigen::Index covariance_row_sum_max(EnsembleKind kind, Eigen::Index n) {
    if (n < 1) throw InvalidDimensionError("matrix dimension must be positive");
    if (n > 64) throw ResourceError("entry-pair enumeration is limited to n <= 64");
    // Entries sharing an input slot are identical random variables, so the
    // row sum for entry (i,j) is the number of entries reading slot
    // entry_offset(i,j). Count slot occupancies once and take the largest.
    std::vector<Eigen::Index> occupancy(required_input_length(kind, n), 0);
    for (Eigen::Index i = 1; i <= n; ++i)
        for (Eigen::Index j = 1; j <= n; ++j) occupancy[entry_offset(kind, n, i, j)]++;
    return *std::max_element(occupancy.begin(), occupancy.end());
}

} // namespace patmat
