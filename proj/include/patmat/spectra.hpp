#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "patmat/ensembles.hpp"

namespace patmat {

/// Eigenvalues indexed k = 1..n (stored at k-1). Frequencies are
/// omega_k = 2*pi*k/n where the formula-based kinds use them.
struct Spectrum {
    EnsembleKind kind = EnsembleKind::Circulant;
    Eigen::Index n = 0;
    Eigen::VectorXcd eigenvalues;
};

[[nodiscard]] inline double omega(Eigen::Index n, Eigen::Index k) {
    return 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
}

/// lambda_k = sum_j x_j e^{i omega_k j}, k = 1..n, via FFT.
[[nodiscard]] Spectrum circulant_spectrum(const Eigen::VectorXd& values, Eigen::Index n);

/// Same eigenvalues by direct O(n^2) summation; cross-checks the FFT route.
[[nodiscard]] Spectrum circulant_spectrum_direct(const Eigen::VectorXd& values, Eigen::Index n);

/// Real eigenvalues of the symmetric circulant: cosine sums over the stored
/// half-sequence, with the alternating extra term when n is even. FFT route.
[[nodiscard]] Spectrum symmetric_circulant_spectrum(const Eigen::VectorXd& values, Eigen::Index n);

[[nodiscard]] Spectrum symmetric_circulant_spectrum_direct(const Eigen::VectorXd& values,
                                                           Eigen::Index n);

/// Reverse circulant eigenvalues: the full-sum eigenvalue, the alternating-sum
/// eigenvalue when n is even, and +-|lambda_k| pairs sharing the circulant
/// magnitudes.
[[nodiscard]] Spectrum reverse_circulant_spectrum(const Eigen::VectorXd& values, Eigen::Index n);

/// Hankel eigenvalues from a dense symmetric eigensolver.
[[nodiscard]] Spectrum hankel_spectrum_dense(const Eigen::VectorXd& values, Eigen::Index n);

/// Kind-dispatched spectrum of a realization.
[[nodiscard]] Spectrum spectrum(const MatrixRealization& real);

struct TraceSample {
    EnsembleKind kind = EnsembleKind::Circulant;
    Eigen::Index n = 0;
    int p = 1;
    double value = 0.0;
};

/// Tr(A^p) of the raw (unnormalized) matrix. Spectral formulas serve the
/// circulant family; reverse circulant restricted to even p rides on the
/// circulant magnitudes; everything else goes through a dense symmetric
/// eigensolver, or structured matrix-vector products past the dense limit.
/// p = 0 returns n exactly.
[[nodiscard]] TraceSample trace_power(const MatrixRealization& real, int p);

/// Oracle: trace of the literal p-th matrix power.
[[nodiscard]] double trace_power_dense(const MatrixRealization& real, int p);

/// Tr(H^p) accumulated column by column with FFT-based Hankel products.
[[nodiscard]] double hankel_trace_matvec(const Eigen::VectorXd& values, Eigen::Index n, int p);

/// Applies an n x n Hankel matrix in O(n log n) through its circulant
/// embedding of size 2n.
class HankelOperator {
public:
    HankelOperator(const Eigen::VectorXd& values, Eigen::Index n);

    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    [[nodiscard]] Eigen::Index dim() const { return n_; }

private:
    Eigen::Index n_;
    Eigen::VectorXcd symbol_fft_;
};

/// Largest singular value. Spectral formulas where available; Hankel uses
/// power iteration on H^2 (all-ones start, Rayleigh-quotient stop at 1e-6
/// relative, at most 10^4 iterations). Non-convergence raises
/// ConvergenceError carrying the best estimate.
[[nodiscard]] double spectral_norm(const MatrixRealization& real);

/// Norm of the size-2n reverse circulant that contains the n x n Hankel of
/// the same inputs as its leading block; never smaller than the Hankel norm.
[[nodiscard]] double embedding_norm_bound(const Eigen::VectorXd& hankel_values, Eigen::Index n);

struct NormScanRow {
    Eigen::Index n = 0;
    Eigen::Index replicates = 0;
    double mean_norm = 0.0;
    double ratio = 0.0; // mean_norm / sqrt(n ln n)
};

/// Averages spectral norms over seeded replicates for each grid point and
/// reports the growth ratio against sqrt(n ln n). Rows sorted by n.
[[nodiscard]] std::vector<NormScanRow> norm_scan(EnsembleKind kind,
                                                 std::vector<Eigen::Index> n_grid,
                                                 Eigen::Index replicates, std::uint64_t seed);

} // namespace patmat
