#include "patmat/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "patmat/parallel.hpp"
#include "patmat/rng.hpp"

namespace patmat {

namespace {

Eigen::FFT<double>& shared_fft() {
    thread_local Eigen::FFT<double> fft;
    return fft;
}

// Forward DFT F_t = sum_j x_j e^{-2 pi i t j / n} of a real vector. The
// length-1 transform is the identity; the FFT backend cannot plan that size.
std::vector<std::complex<double>> forward_dft(const Eigen::VectorXd& x) {
    if (x.size() == 1) return {std::complex<double>(x[0], 0.0)};
    std::vector<std::complex<double>> in(x.size()), out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) in[j] = x[j];
    shared_fft().fwd(out, in);
    return out;
}

void check_length(const Eigen::VectorXd& values, EnsembleKind kind, Eigen::Index n) {
    if (n < 1) throw InvalidDimensionError("matrix dimension must be positive");
    if (values.size() != required_input_length(kind, n))
        throw ShapeError("input length does not match the pattern for this dimension");
}

std::complex<double> int_pow(std::complex<double> base, int p) {
    std::complex<double> acc(1.0, 0.0);
    for (int i = 0; i < p; ++i) acc *= base;
    return acc;
}

double int_pow(double base, int p) {
    double acc = 1.0;
    for (int i = 0; i < p; ++i) acc *= base;
    return acc;
}

Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

constexpr Eigen::Index kDenseTraceLimit = 1024;

} // namespace

Spectrum circulant_spectrum(const Eigen::VectorXd& values, Eigen::Index n) {
    check_length(values, EnsembleKind::Circulant, n);
    const auto f = forward_dft(values);
    Spectrum s{EnsembleKind::Circulant, n, Eigen::VectorXcd(n)};
    // lambda_k = conj(F_k) for real inputs; k = n lands on F_0.
    for (Eigen::Index k = 1; k <= n; ++k) s.eigenvalues[k - 1] = std::conj(f[k % n]);
    return s;
}

Spectrum circulant_spectrum_direct(const Eigen::VectorXd& values, Eigen::Index n) {
    check_length(values, EnsembleKind::Circulant, n);
    Spectrum s{EnsembleKind::Circulant, n, Eigen::VectorXcd(n)};
    for (Eigen::Index k = 1; k <= n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double arg = omega(n, k) * static_cast<double>(j);
            acc += values[j] * std::complex<double>(std::cos(arg), std::sin(arg));
        }
        s.eigenvalues[k - 1] = acc;
    }
    return s;
}

namespace {

// Symmetric extension [x_0, x_1, ..., x_{floor(n/2)}, ..., x_2, x_1] whose DFT
// is the real symmetric-circulant spectrum, for odd and even n alike.
Eigen::VectorXd symmetric_extension(const Eigen::VectorXd& values, Eigen::Index n) {
    Eigen::VectorXd y(n);
    y[0] = values[0];
    for (Eigen::Index j = 1; j <= n / 2; ++j) {
        y[j] = values[j];
        if (n - j < n) y[n - j] = values[j];
    }
    return y;
}

} // namespace

Spectrum symmetric_circulant_spectrum(const Eigen::VectorXd& values, Eigen::Index n) {
    check_length(values, EnsembleKind::SymmetricCirculant, n);
    const auto f = forward_dft(symmetric_extension(values, n));
    Spectrum s{EnsembleKind::SymmetricCirculant, n, Eigen::VectorXcd(n)};
    for (Eigen::Index k = 1; k <= n; ++k) s.eigenvalues[k - 1] = f[k % n].real();
    return s;
}

Spectrum symmetric_circulant_spectrum_direct(const Eigen::VectorXd& values, Eigen::Index n) {
    check_length(values, EnsembleKind::SymmetricCirculant, n);
    Spectrum s{EnsembleKind::SymmetricCirculant, n, Eigen::VectorXcd(n)};
    const Eigen::Index half = (n % 2 == 0) ? n / 2 - 1 : n / 2;
    for (Eigen::Index k = 1; k <= n; ++k) {
        double acc = values[0];
        for (Eigen::Index j = 1; j <= half; ++j)
            acc += 2.0 * values[j] * std::cos(omega(n, k) * static_cast<double>(j));
        if (n % 2 == 0) acc += (k % 2 == 0 ? 1.0 : -1.0) * values[n / 2];
        s.eigenvalues[k - 1] = acc;
    }
    return s;
}

Spectrum reverse_circulant_spectrum(const Eigen::VectorXd& values, Eigen::Index n) {
    check_length(values, EnsembleKind::ReverseCirculant, n);
    const Spectrum circ = circulant_spectrum(values, n);
    Spectrum s{EnsembleKind::ReverseCirculant, n, Eigen::VectorXcd(n)};
    Eigen::Index pos = 0;
    const Eigen::Index pairs = (n - 1) / 2;
    for (Eigen::Index k = 1; k <= pairs; ++k) {
        const double mag = std::abs(circ.eigenvalues[k - 1]);
        s.eigenvalues[pos++] = mag;
        s.eigenvalues[pos++] = -mag;
    }
    if (n % 2 == 0) s.eigenvalues[pos++] = circ.eigenvalues[n / 2 - 1].real();
    s.eigenvalues[pos++] = circ.eigenvalues[n - 1].real();
    return s;
}

Spectrum hankel_spectrum_dense(const Eigen::VectorXd& values, Eigen::Index n) {
    check_length(values, EnsembleKind::Hankel, n);
    if (n > kDenseLimit) throw ResourceError("dimension exceeds the dense eigensolver limit");
    const Eigen::VectorXd eig = dense_eigenvalues(dense_pattern(EnsembleKind::Hankel, n, values));
    Spectrum s{EnsembleKind::Hankel, n, Eigen::VectorXcd(n)};
    for (Eigen::Index i = 0; i < n; ++i) s.eigenvalues[i] = eig[i];
    return s;
}

Spectrum spectrum(const MatrixRealization& real) {
    switch (real.kind) {
        case EnsembleKind::Circulant: return circulant_spectrum(real.input.values, real.n);
        case EnsembleKind::SymmetricCirculant:
            return symmetric_circulant_spectrum(real.input.values, real.n);
        case EnsembleKind::ReverseCirculant:
            return reverse_circulant_spectrum(real.input.values, real.n);
        case EnsembleKind::Hankel: return hankel_spectrum_dense(real.input.values, real.n);
    }
    throw InvalidArgumentError("unknown ensemble kind");
}

TraceSample trace_power(const MatrixRealization& real, int p) {
    if (p < 0) throw InvalidArgumentError("trace power must be nonnegative");
    TraceSample out{real.kind, real.n, p, static_cast<double>(real.n)};
    if (p == 0) return out;

    switch (real.kind) {
        case EnsembleKind::Circulant: {
            const Spectrum s = circulant_spectrum(real.input.values, real.n);
            std::complex<double> acc(0.0, 0.0);
            double scale = 0.0;
            for (Eigen::Index k = 0; k < real.n; ++k) {
                acc += int_pow(s.eigenvalues[k], p);
                scale += std::pow(std::abs(s.eigenvalues[k]), p);
            }
            if (std::abs(acc.imag()) > 1e-6 * std::max(scale, 1e-300))
                throw NumericError("imaginary residual of a circulant trace exceeds tolerance");
            out.value = acc.real();
            return out;
        }
        case EnsembleKind::SymmetricCirculant: {
            const Spectrum s = symmetric_circulant_spectrum(real.input.values, real.n);
            double acc = 0.0;
            for (Eigen::Index k = 0; k < real.n; ++k) acc += int_pow(s.eigenvalues[k].real(), p);
            out.value = acc;
            return out;
        }
        case EnsembleKind::ReverseCirculant: {
            if (p % 2 == 0) {
                const Spectrum s = circulant_spectrum(real.input.values, real.n);
                double acc = 0.0;
                for (Eigen::Index k = 0; k < real.n; ++k)
                    acc += int_pow(std::abs(s.eigenvalues[k]), p);
                out.value = acc;
                return out;
            }
            if (real.n > kDenseLimit)
                throw ResourceError("odd reverse-circulant powers need the dense eigensolver");
            const Eigen::VectorXd eig = dense_eigenvalues(dense_matrix(real));
            double acc = 0.0;
            for (Eigen::Index k = 0; k < real.n; ++k) acc += int_pow(eig[k], p);
            out.value = acc;
            return out;
        }
        case EnsembleKind::Hankel: {
            if (real.n > kDenseTraceLimit) {
                out.value = hankel_trace_matvec(real.input.values, real.n, p);
                return out;
            }
            const Eigen::VectorXd eig = dense_eigenvalues(dense_matrix(real));
            double acc = 0.0;
            for (Eigen::Index k = 0; k < real.n; ++k) acc += int_pow(eig[k], p);
            out.value = acc;
            return out;
        }
    }
    throw InvalidArgumentError("unknown ensemble kind");
}

double trace_power_dense(const MatrixRealization& real, int p) {
    if (p < 0) throw InvalidArgumentError("trace power must be nonnegative");
    if (p == 0) return static_cast<double>(real.n);
    const Eigen::MatrixXd a = dense_matrix(real);
    Eigen::MatrixXd power = a;
    for (int i = 1; i < p; ++i) power = (power * a).eval();
    return power.trace();
}

HankelOperator::HankelOperator(const Eigen::VectorXd& values, Eigen::Index n) : n_(n) {
    check_length(values, EnsembleKind::Hankel, n);
    Eigen::VectorXd symbol = Eigen::VectorXd::Zero(2 * n);
    symbol.head(2 * n - 1) = values;
    const auto f = forward_dft(symbol);
    symbol_fft_ = Eigen::Map<const Eigen::VectorXcd>(f.data(), 2 * n);
}

Eigen::VectorXd HankelOperator::apply(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw ShapeError("operand length does not match the operator dimension");
    const Eigen::Index big = 2 * n_;
    // (H x)_a = sum_b v_{a+b} x_b is the leading half of a circular
    // convolution of the padded symbol with the cyclically reversed operand.
    std::vector<std::complex<double>> w(big, std::complex<double>(0.0, 0.0));
    w[0] = x[0];
    for (Eigen::Index b = n_ + 1; b < big; ++b) w[b] = x[big - b];
    std::vector<std::complex<double>> wf(big), prod(big), conv(big);
    shared_fft().fwd(wf, w);
    for (Eigen::Index t = 0; t < big; ++t) prod[t] = symbol_fft_[t] * wf[t];
    shared_fft().inv(conv, prod);
    Eigen::VectorXd out(n_);
    for (Eigen::Index a = 0; a < n_; ++a) out[a] = conv[a].real();
    return out;
}

double hankel_trace_matvec(const Eigen::VectorXd& values, Eigen::Index n, int p) {
    if (p < 0) throw InvalidArgumentError("trace power must be nonnegative");
    if (p == 0) return static_cast<double>(n);
    const HankelOperator op(values, n);
    std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        v[static_cast<Eigen::Index>(b)] = 1.0;
        for (int i = 0; i < p; ++i) v = op.apply(v);
        diag[b] = v[static_cast<Eigen::Index>(b)];
    });
    return std::accumulate(diag.begin(), diag.end(), 0.0);
}

namespace {

constexpr int kPowerMaxIterations = 10000;
constexpr double kPowerTolerance = 1e-6;

double hankel_norm_power_iteration(const Eigen::VectorXd& values, Eigen::Index n) {
    const HankelOperator op(values, n);
    Eigen::VectorXd z = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double rho_prev = -1.0;
    double best = 0.0;
    for (int it = 0; it < kPowerMaxIterations; ++it) {
        const Eigen::VectorXd w = op.apply(z);
        const double rho = w.squaredNorm(); // z^T H^2 z for unit z
        best = std::sqrt(rho);
        if (rho == 0.0) return 0.0;
        if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= kPowerTolerance * rho) return best;
        rho_prev = rho;
        const Eigen::VectorXd z2 = op.apply(w);
        const double norm = z2.norm();
        if (norm == 0.0) return best;
        z = z2 / norm;
    }
    throw ConvergenceError("power iteration did not reach tolerance", best);
}

} // namespace

double spectral_norm(const MatrixRealization& real) {
    switch (real.kind) {
        case EnsembleKind::Circulant:
        case EnsembleKind::ReverseCirculant: {
            const Spectrum s = circulant_spectrum(real.input.values, real.n);
            return s.eigenvalues.cwiseAbs().maxCoeff();
        }
        case EnsembleKind::SymmetricCirculant: {
            const Spectrum s = symmetric_circulant_spectrum(real.input.values, real.n);
            return s.eigenvalues.cwiseAbs().maxCoeff();
        }
        case EnsembleKind::Hankel:
            return hankel_norm_power_iteration(real.input.values, real.n);
    }
    throw InvalidArgumentError("unknown ensemble kind");
}

double embedding_norm_bound(const Eigen::VectorXd& hankel_values, Eigen::Index n) {
    check_length(hankel_values, EnsembleKind::Hankel, n);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(2 * n);
    padded.head(2 * n - 1) = hankel_values;
    MatrixRealization rc{EnsembleKind::ReverseCirculant, 2 * n, InputSequence{padded, 0}};
    return spectral_norm(rc);
}

std::vector<NormScanRow> norm_scan(EnsembleKind kind, std::vector<Eigen::Index> n_grid,
                                   Eigen::Index replicates, std::uint64_t seed) {
    if (replicates < 1) throw InvalidArgumentError("replicates must be positive");
    for (const Eigen::Index n : n_grid)
        if (n < 3) throw InvalidArgumentError("norm scan requires n >= 3");
    std::sort(n_grid.begin(), n_grid.end());

    std::vector<NormScanRow> rows(n_grid.size());
    const std::size_t cells = n_grid.size() * static_cast<std::size_t>(replicates);
    std::vector<double> norms(cells, 0.0);
    parallel_for(cells, [&](std::size_t cell) {
        const std::size_t gi = cell / static_cast<std::size_t>(replicates);
        const std::size_t r = cell % static_cast<std::size_t>(replicates);
        const Eigen::Index n = n_grid[gi];
        const std::uint64_t cell_seed =
            derive_stream(derive_stream(seed, static_cast<std::uint64_t>(n)), r);
        norms[cell] = spectral_norm(make_realization(kind, n, cell_seed));
    });
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const Eigen::Index n = n_grid[gi];
        double mean = 0.0;
        for (Eigen::Index r = 0; r < replicates; ++r)
            mean += norms[gi * static_cast<std::size_t>(replicates) + static_cast<std::size_t>(r)];
        mean /= static_cast<double>(replicates);
        const double scale = std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
        rows[gi] = NormScanRow{n, replicates, mean, mean / scale};
    }
    return rows;
}

} // namespace patmat
