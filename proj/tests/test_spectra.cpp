#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "patmat/rng.hpp"
#include "patmat/spectra.hpp"

using namespace patmat;

namespace {

double spread(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }

// Pairs every computed eigenvalue with its nearest dense-solver eigenvalue.
void require_multiset_close(const Eigen::VectorXcd& got, const Eigen::VectorXcd& expected,
                            double tol) {
    REQUIRE(got.size() == expected.size());
    std::vector<bool> used(static_cast<std::size_t>(expected.size()), false);
    for (Eigen::Index i = 0; i < got.size(); ++i) {
        Eigen::Index best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < expected.size(); ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            double dist = std::abs(got[i] - expected[j]);
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        REQUIRE(best >= 0);
        REQUIRE(best_dist <= tol);
        used[static_cast<std::size_t>(best)] = true;
    }
}

Eigen::VectorXcd dense_spectrum_oracle(const MatrixRealization& real) {
    Eigen::MatrixXd a = dense_matrix(real);
    if (real.kind == EnsembleKind::Circulant) {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
        return solver.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cast<std::complex<double>>();
}

} // namespace

TEST_CASE("circulant spectra agree between fft and direct summation", "[spectra]") {
    for (Eigen::Index n : {1, 2, 3, 8, 401, 513}) {
        Eigen::VectorXd values = sample_input(EnsembleKind::Circulant, n, 11 + n).values;
        Spectrum fft = circulant_spectrum(values, n);
        Spectrum direct = circulant_spectrum_direct(values, n);
        double scale = std::max(1.0, spread(fft.eigenvalues));
        REQUIRE((fft.eigenvalues - direct.eigenvalues).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    }
}

TEST_CASE("symmetric circulant spectra agree between fft and direct summation", "[spectra]") {
    for (Eigen::Index n : {1, 2, 3, 8, 401, 512}) {
        Eigen::VectorXd values = sample_input(EnsembleKind::SymmetricCirculant, n, 23 + n).values;
        Spectrum fft = symmetric_circulant_spectrum(values, n);
        Spectrum direct = symmetric_circulant_spectrum_direct(values, n);
        double scale = std::max(1.0, spread(fft.eigenvalues));
        REQUIRE((fft.eigenvalues - direct.eigenvalues).cwiseAbs().maxCoeff() <= 1e-8 * scale);
        REQUIRE(fft.eigenvalues.imag().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("formula spectra match the dense eigensolver", "[spectra]") {
    for (EnsembleKind kind : {EnsembleKind::Circulant, EnsembleKind::SymmetricCirculant,
                              EnsembleKind::ReverseCirculant, EnsembleKind::Hankel}) {
        for (Eigen::Index n : {2, 5, 6, 9, 16}) {
            MatrixRealization real = make_realization(kind, n, 37 + n);
            Spectrum s = spectrum(real);
            REQUIRE(s.n == n);
            REQUIRE(s.eigenvalues.size() == n);
            Eigen::VectorXcd oracle = dense_spectrum_oracle(real);
            double scale = std::max(1.0, spread(oracle));
            require_multiset_close(s.eigenvalues, oracle, 1e-8 * scale);
        }
    }
}

TEST_CASE("spectrum sums reproduce the trace", "[spectra]") {
    for (EnsembleKind kind : {EnsembleKind::Circulant, EnsembleKind::SymmetricCirculant,
                              EnsembleKind::ReverseCirculant, EnsembleKind::Hankel}) {
        for (Eigen::Index n : {5, 6}) {
            MatrixRealization real = make_realization(kind, n, 101 + n);
            Spectrum s = spectrum(real);
            std::complex<double> sum = s.eigenvalues.sum();
            double trace = dense_matrix(real).trace();
            double scale = std::max(1.0, s.eigenvalues.cwiseAbs().sum());
            REQUIRE(std::abs(sum - std::complex<double>(trace, 0.0)) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("squared spectrum magnitudes satisfy parseval", "[spectra]") {
    for (Eigen::Index n : {4, 9, 64}) {
        Eigen::VectorXd values = sample_input(EnsembleKind::Circulant, n, 7 * n).values;
        double energy = static_cast<double>(n) * values.squaredNorm();
        double circ = circulant_spectrum(values, n).eigenvalues.cwiseAbs2().sum();
        double rev = reverse_circulant_spectrum(values, n).eigenvalues.cwiseAbs2().sum();
        REQUIRE(circ == Catch::Approx(energy).epsilon(1e-9));
        REQUIRE(rev == Catch::Approx(energy).epsilon(1e-9));
    }
}

TEST_CASE("reverse circulant eigenvalues pair up by sign", "[spectra]") {
    for (Eigen::Index n : {7, 8}) {
        Eigen::VectorXd values = sample_input(EnsembleKind::ReverseCirculant, n, 55).values;
        Eigen::VectorXcd eig = reverse_circulant_spectrum(values, n).eigenvalues;
        Eigen::Index pairs = (n - 1) / 2;
        for (Eigen::Index k = 0; k < pairs; ++k) {
            REQUIRE(eig[2 * k].real() == Catch::Approx(-eig[2 * k + 1].real()).margin(1e-12));
            REQUIRE(eig[2 * k].real() >= 0.0);
        }
        // The final slot carries the plain sum of the inputs.
        REQUIRE(eig[n - 1].real() == Catch::Approx(values.sum()).epsilon(1e-9));
    }
}

TEST_CASE("trace powers match the dense oracle", "[spectra]") {
    for (EnsembleKind kind : {EnsembleKind::Circulant, EnsembleKind::SymmetricCirculant,
                              EnsembleKind::ReverseCirculant, EnsembleKind::Hankel}) {
        for (Eigen::Index n : {1, 2, 3, 5, 8, 16, 64}) {
            MatrixRealization real = make_realization(kind, n, 211 + n);
            for (int p = 0; p <= 6; ++p) {
                TraceSample sample = trace_power(real, p);
                REQUIRE(sample.kind == kind);
                REQUIRE(sample.n == n);
                REQUIRE(sample.p == p);
                double oracle = trace_power_dense(real, p);
                double scale = std::max(std::abs(oracle), 1.0);
                REQUIRE(std::abs(sample.value - oracle) <= 1e-6 * scale);
            }
        }
    }
}

TEST_CASE("trace power zero counts the dimension exactly", "[spectra]") {
    MatrixRealization real = make_realization(EnsembleKind::Hankel, 17, 3);
    CHECK(trace_power(real, 0).value == 17.0);
    CHECK_THROWS_AS(trace_power(real, -1), InvalidArgumentError);
}

TEST_CASE("trace powers scale like the matrix power", "[spectra]") {
    for (EnsembleKind kind : {EnsembleKind::Circulant, EnsembleKind::SymmetricCirculant,
                              EnsembleKind::ReverseCirculant, EnsembleKind::Hankel}) {
        MatrixRealization real = make_realization(kind, 12, 97);
        MatrixRealization scaled = real;
        scaled.input.values *= 3.0;
        for (int p = 1; p <= 4; ++p) {
            double base = trace_power(real, p).value;
            double factor = std::pow(3.0, p);
            REQUIRE(trace_power(scaled, p).value ==
                    Catch::Approx(factor * base).epsilon(1e-9));
        }
    }
}

TEST_CASE("hankel operator applies the dense matrix", "[spectra]") {
    for (Eigen::Index n : {1, 2, 3, 5, 8, 33}) {
        Eigen::VectorXd values = sample_input(EnsembleKind::Hankel, n, 5 * n + 1).values;
        HankelOperator op(values, n);
        REQUIRE(op.dim() == n);
        Eigen::MatrixXd dense = dense_pattern(EnsembleKind::Hankel, n, values);
        Eigen::VectorXd x = gaussian_vector(n, 999);
        Eigen::VectorXd expect = dense * x;
        Eigen::VectorXd got = op.apply(x);
        double scale = std::max(1.0, expect.cwiseAbs().maxCoeff());
        REQUIRE((got - expect).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    }
    HankelOperator op(sample_input(EnsembleKind::Hankel, 4, 8).values, 4);
    CHECK_THROWS_AS(op.apply(Eigen::VectorXd::Zero(5)), ShapeError);
}

TEST_CASE("hankel trace by matvec agrees with the dense power", "[spectra]") {
    for (Eigen::Index n : {4, 8, 16, 33}) {
        Eigen::VectorXd values = sample_input(EnsembleKind::Hankel, n, 13 * n).values;
        MatrixRealization real{EnsembleKind::Hankel, n, InputSequence{values, 0}};
        for (int p : {1, 2, 3, 4, 5}) {
            double got = hankel_trace_matvec(values, n, p);
            double oracle = trace_power_dense(real, p);
            REQUIRE(got == Catch::Approx(oracle).epsilon(1e-6));
        }
    }
}

TEST_CASE("hankel trace dispatch crosses the dense limit consistently", "[spectra][slow]") {
    // n = 1025 exceeds the dense-eigensolver cutoff, so trace_power switches
    // to the fft-based matrix products; the literal matrix power still fits.
    MatrixRealization real = make_realization(EnsembleKind::Hankel, 1025, 4242);
    double via_dispatch = trace_power(real, 2).value;
    double frobenius = dense_matrix(real).squaredNorm();
    REQUIRE(via_dispatch == Catch::Approx(frobenius).epsilon(1e-6));
}

TEST_CASE("spectral norms match dense singular values", "[spectra]") {
    for (EnsembleKind kind : {EnsembleKind::Circulant, EnsembleKind::SymmetricCirculant,
                              EnsembleKind::ReverseCirculant, EnsembleKind::Hankel}) {
        for (Eigen::Index n : {8, 16}) {
            MatrixRealization real = make_realization(kind, n, 300 + n);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense_matrix(real));
            double oracle = svd.singularValues()[0];
            double tol = kind == EnsembleKind::Hankel ? 5e-4 : 1e-9;
            REQUIRE(spectral_norm(real) == Catch::Approx(oracle).epsilon(tol));
        }
    }
}

TEST_CASE("embedding norm dominates the hankel norm", "[spectra]") {
    for (Eigen::Index n : {4, 9, 16, 25}) {
        MatrixRealization real = make_realization(EnsembleKind::Hankel, n, 600 + n);
        double hankel = spectral_norm(real);
        double bound = embedding_norm_bound(real.input.values, n);
        REQUIRE(bound >= hankel * (1.0 - 1e-6));
    }
}

TEST_CASE("norm scan orders rows and reports the growth ratio", "[spectra]") {
    std::vector<Eigen::Index> grid = {32, 8, 16};
    std::vector<NormScanRow> rows = norm_scan(EnsembleKind::Circulant, grid, 3, 71);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].n == 8);
    CHECK(rows[1].n == 16);
    CHECK(rows[2].n == 32);
    for (const NormScanRow& row : rows) {
        CHECK(row.replicates == 3);
        CHECK(row.mean_norm > 0.0);
        double scale = std::sqrt(static_cast<double>(row.n) * std::log(static_cast<double>(row.n)));
        CHECK(row.ratio == Catch::Approx(row.mean_norm / scale).epsilon(1e-12));
    }
    std::vector<NormScanRow> again = norm_scan(EnsembleKind::Circulant, grid, 3, 71);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i].mean_norm == again[i].mean_norm);
    CHECK_THROWS_AS(norm_scan(EnsembleKind::Circulant, {2, 8}, 3, 1), InvalidArgumentError);
    CHECK_THROWS_AS(norm_scan(EnsembleKind::Circulant, {8, 16}, 0, 1), InvalidArgumentError);
}
