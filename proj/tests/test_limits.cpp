#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "patmat/limits.hpp"

using namespace patmat;

namespace {

double as_double(const BigInt& v) { return v.convert_to<double>(); }

BigInt ipoly(long long n, std::initializer_list<long long> coeffs) {
    // coeffs are listed from the highest power down to the constant term.
    BigInt acc = 0;
    for (long long c : coeffs) acc = acc * n + c;
    return acc;
}

// Integral of the density over [0, p] by 3-point Gauss-Legendre on 200
// panels per unit interval. Nodes stay strictly inside each panel, so the
// jump at the support edge for p = 1 and the kinks at integer points (all on
// panel boundaries) never get sampled; the piecewise-polynomial pieces make
// the quadrature error far smaller than 1e-9.
double integrate_density(int p) {
    constexpr int panels = 200;
    const double node = std::sqrt(0.6);
    double total = 0.0;
    for (int unit = 0; unit < p; ++unit) {
        for (int i = 0; i < panels; ++i) {
            double half = 0.5 / panels;
            double mid = unit + (2 * i + 1) * half;
            total += half * (5.0 * irwin_hall_density(p, mid - half * node) +
                             8.0 * irwin_hall_density(p, mid) +
                             5.0 * irwin_hall_density(p, mid + half * node)) /
                     9.0;
        }
    }
    return total;
}

} // namespace

TEST_CASE("family names round-trip", "[limits]") {
    for (CardFamily family : {CardFamily::A, CardFamily::B, CardFamily::Bk}) {
        CHECK(parse_family(family_name(family)) == family);
    }
    CHECK_THROWS_AS(parse_family("C"), InvalidArgumentError);
}

TEST_CASE("uniform sum density anchors", "[limits]") {
    CHECK(irwin_hall_density(1, 0.5) == Catch::Approx(1.0));
    CHECK(irwin_hall_density(1, 0.123) == Catch::Approx(1.0));
    CHECK(irwin_hall_density(2, 1.0) == Catch::Approx(1.0));
    CHECK(irwin_hall_density(2, 0.25) == Catch::Approx(0.25));
    CHECK(irwin_hall_density(3, 1.5) == Catch::Approx(0.75));
    CHECK(irwin_hall_density(4, 2.0) == Catch::Approx(2.0 / 3.0));
    CHECK(irwin_hall_density(2, -0.5) == 0.0);
    CHECK(irwin_hall_density(2, 2.5) == 0.0);
    CHECK(irwin_hall_density(3, 0.0) == 0.0);
    CHECK(irwin_hall_density(3, 3.0) == 0.0);
}

TEST_CASE("uniform sum density is symmetric and normalized", "[limits]") {
    for (int p = 1; p <= 8; ++p) {
        for (double x = 0.05; x < p / 2.0; x += 0.175) {
            REQUIRE(irwin_hall_density(p, x) ==
                    Catch::Approx(irwin_hall_density(p, p - x)).margin(1e-12));
        }
        REQUIRE(integrate_density(p) == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("closed-form counts at pinned examples", "[limits]") {
    CardinalityResult a0 = card_A(2, 0, 10);
    CHECK(a0.count == 1);
    CHECK(a0.in_range);
    CHECK(a0.family == CardFamily::A);
    CHECK(a0.p == 2);
    CHECK(a0.s == 0);
    CHECK(a0.n == 10);
    CHECK(card_A(2, 1, 10).count == 9);
    CHECK(card_A(3, 1, 5).count == 18);
    CHECK(card_B(1, 0, 5).count == 5);
    CHECK(card_B(2, 0, 4).count == 44);
    CardinalityResult out = card_B(1, 1, 5);
    CHECK(out.count == 0);
    CHECK_FALSE(out.in_range);
    CHECK(card_B_k(2, 1, 20).count == 10);
}

TEST_CASE("counts agree with direct enumeration", "[limits]") {
    for (int p = 1; p <= 4; ++p)
        for (long long s = 0; s <= p - 1; ++s)
            for (Eigen::Index n : {2, 3, 5, 8}) {
                INFO("A p=" << p << " s=" << s << " n=" << n);
                REQUIRE(card_A(p, s, n).count == brute_card(CardFamily::A, p, s, n).count);
            }
    for (int p = 1; p <= 2; ++p)
        for (long long s = -p; s <= p; ++s)
            for (Eigen::Index n : {2, 3, 5, 6}) {
                INFO("B p=" << p << " s=" << s << " n=" << n);
                REQUIRE(card_B(p, s, n).count == brute_card(CardFamily::B, p, s, n).count);
            }
    for (int p = 2; p <= 4; ++p)
        for (int k = 1; k <= p; ++k)
            for (Eigen::Index n : {4, 5, 9, 12}) {
                INFO("Bk p=" << p << " k=" << k << " n=" << n);
                REQUIRE(card_B_k(p, k, n).count == brute_card(CardFamily::Bk, p, k, n).count);
            }
}

TEST_CASE("alternating counts are symmetric in the sign of s", "[limits]") {
    for (int p = 1; p <= 2; ++p)
        for (long long s = 0; s <= p; ++s)
            for (Eigen::Index n : {2, 5, 8}) {
                REQUIRE(card_B(p, s, n).count == card_B(p, -s, n).count);
            }
}

TEST_CASE("counts tile the full lattice", "[limits]") {
    // Fixing all coordinates but the last leaves exactly one completion per
    // residue class, so the counts over all admissible s recover n^(p-1)
    // (plain sums) and n^(2p-1) (alternating sums).
    for (int p = 1; p <= 5; ++p)
        for (Eigen::Index n : {2, 3, 7, 10}) {
            BigInt total = 0;
            for (long long s = 0; s <= p - 1; ++s) total += card_A(p, s, n).count;
            BigInt expect = 1;
            for (int i = 1; i < p; ++i) expect *= n;
            REQUIRE(total == expect);
        }
    for (int p = 1; p <= 2; ++p)
        for (Eigen::Index n : {2, 5, 8}) {
            BigInt total = 0;
            for (long long s = -p; s <= p; ++s) total += card_B(p, s, n).count;
            BigInt expect = 1;
            for (int i = 1; i < 2 * p; ++i) expect *= n;
            REQUIRE(total == expect);
        }
    for (int p = 2; p <= 4; ++p)
        for (int k = 1; k <= 2 && k <= p; ++k)
            for (Eigen::Index n : {6, 11, 20}) {
                BigInt total = 0;
                for (long long s = -p; s <= p; ++s) total += card_B_k_s(p, k, s, n);
                REQUIRE(total == card_B_k(p, k, n).count);
            }
}

TEST_CASE("lattice counts approach the density", "[limits]") {
    struct Probe {
        int p;
        long long s;
        double density;
    };
    for (const Probe& probe : {Probe{2, 1, 1.0}, Probe{3, 1, 0.5}, Probe{3, 2, 0.5},
                               Probe{4, 2, 2.0 / 3.0}}) {
        const Eigen::Index n = 2000;
        double scaled =
            as_double(card_A(probe.p, probe.s, n).count) / std::pow(static_cast<double>(n),
                                                                    probe.p - 1);
        REQUIRE(std::abs(scaled - probe.density) <= 2e-3);
    }
}

TEST_CASE("wrapped counts approach their limit weights", "[limits]") {
    CHECK(as_double(card_B_k(2, 1, 4000).count) / 4000.0 == Catch::Approx(0.5));
    double scaled = as_double(card_B_k(3, 1, 4001).count) / (4001.0 * 4001.0);
    CHECK(std::abs(scaled - h_limit(3, 1)) <= 2e-3);
}

TEST_CASE("pairing weights take their frozen values", "[limits]") {
    CHECK(h_limit(1, 0) == 0.0);
    CHECK(h_limit(1, 1) == 0.0);
    CHECK(h_limit(2, 0) == 0.0);
    CHECK(h_limit(2, 1) == Catch::Approx(0.5));
    CHECK(h_limit(2, 2) == 0.0);
    for (int k = 0; k <= 3; ++k) CHECK(h_limit(3, k) == Catch::Approx(0.125));
    const double h4[] = {1.0 / 12, 1.0 / 24, 1.0 / 12, 1.0 / 24, 1.0 / 12};
    for (int k = 0; k <= 4; ++k) CHECK(h_limit(4, k) == Catch::Approx(h4[k]));
    for (int p = 2; p <= 6; ++p)
        for (int k = 0; k <= p; ++k)
            CHECK(h_limit(p, k) == Catch::Approx(h_limit(p, p - k)).margin(1e-14));
    CHECK_THROWS_AS(h_limit(2, 3), InvalidArgumentError);
    CHECK_THROWS_AS(h_limit(2, -1), InvalidArgumentError);

    CHECK(g_const(1) == 2.0);
    CHECK(g_const(2) == Catch::Approx(16.0 / 3.0));
    CHECK(g_const(3) == Catch::Approx(261.0 / 5.0));
    CHECK_THROWS_AS(g_const(0), InvalidArgumentError);
}

TEST_CASE("variance limits take their frozen values", "[limits]") {
    double factorial = 1.0;
    for (int p = 1; p <= 6; ++p) {
        factorial *= p;
        LimitValue limit = limit_var_circulant(p);
        CHECK(limit.value == Catch::Approx(factorial));
        CHECK(limit.kind == EnsembleKind::Circulant);
        CHECK(limit.parity == "any");
    }
    CHECK(limit_var_reverse_circulant(1).parity == "even");
    CHECK(limit_var_reverse_circulant(1).value == Catch::Approx(2.0));
    CHECK(limit_var_reverse_circulant(2).value == Catch::Approx(112.0 / 3.0));
    CHECK(limit_var_reverse_circulant(3).value == Catch::Approx(5661.0 / 5.0));
    CHECK_THROWS_AS(limit_var_circulant(0), InvalidArgumentError);
    CHECK_THROWS_AS(limit_var_reverse_circulant(0), InvalidArgumentError);
}

TEST_CASE("symmetric circulant limits cover both parities", "[limits]") {
    LimitValue odd1 = limit_var_symmetric_circulant(1);
    CHECK(odd1.value == Catch::Approx(1.0));
    CHECK(odd1.parity == "odd");
    CHECK(limit_var_symmetric_circulant(3).value == Catch::Approx(15.0));
    CHECK(limit_var_symmetric_circulant(5).value == Catch::Approx(945.0));

    LimitValue even2 = limit_var_symmetric_circulant(2);
    CHECK(even2.value == Catch::Approx(0.5));
    CHECK(even2.parity == "even");
    CHECK(limit_var_symmetric_circulant(4).value == Catch::Approx(222.0));

    // The two readings of the interior halving exponent agree through p = 5
    // and separate at p = 6.
    for (int p = 1; p <= 5; ++p) {
        double d = limit_var_symmetric_circulant(p, ScEvenScaling::DoubleExponent).value;
        double s = limit_var_symmetric_circulant(p, ScEvenScaling::SingleExponent).value;
        CHECK(d == Catch::Approx(s));
    }
    CHECK(limit_var_symmetric_circulant(6, ScEvenScaling::DoubleExponent).value ==
          Catch::Approx(68257.5));
    CHECK(limit_var_symmetric_circulant(6, ScEvenScaling::SingleExponent).value ==
          Catch::Approx(114157.5));
}

TEST_CASE("exact trace moments at pinned anchors", "[limits]") {
    ExactTraceMoments c82 = exact_trace_moments(EnsembleKind::Circulant, 8, 2);
    CHECK(c82.mean == 16);
    CHECK(c82.variance == 1024);

    ExactTraceMoments sc92 = exact_trace_moments(EnsembleKind::SymmetricCirculant, 9, 2);
    CHECK(sc92.mean == 81);
    CHECK(sc92.variance == 2754);

    for (long long n : {3, 4, 9}) {
        ExactTraceMoments m = exact_trace_moments(EnsembleKind::Circulant, n, 1);
        CHECK(m.mean == 0);
        CHECK(m.variance == n * n);
    }
    for (long long n : {3, 4, 5, 9}) {
        ExactTraceMoments m = exact_trace_moments(EnsembleKind::ReverseCirculant, n, 2);
        CHECK(m.mean == n * n);
        CHECK(m.variance == 2 * n * n * n);
    }
}

TEST_CASE("exact variances follow parity-resolved polynomials", "[limits]") {
    // Finite-n variances of the trace powers, computed exactly, collapse to
    // polynomials in n whose leading coefficient is the ensemble's limiting
    // variance. The lower-order coefficients depend on the parity of n.
    for (long long n : {3, 4, 5, 8, 9}) {
        CHECK(exact_trace_moments(EnsembleKind::Circulant, n, 2).variance ==
              ipoly(n, {2, 0, 0, 0}));
    }
    for (long long n : {5, 9, 11})
        CHECK(exact_trace_moments(EnsembleKind::Circulant, n, 3).variance ==
              ipoly(n, {6, 9, 0, 0, 0}));
    for (long long n : {8, 16})
        CHECK(exact_trace_moments(EnsembleKind::Circulant, n, 3).variance ==
              ipoly(n, {6, 18, 0, 0, 0}));
    for (long long n : {3, 5, 7, 9, 11, 13})
        CHECK(exact_trace_moments(EnsembleKind::Circulant, n, 4).variance ==
              ipoly(n, {24, 72, 0, 0, 0, 0}));
    for (long long n : {4, 6, 8})
        CHECK(exact_trace_moments(EnsembleKind::Circulant, n, 4).variance ==
              ipoly(n, {24, 144, 0, 0, 0, 0}));

    for (long long n : {5, 9, 17})
        CHECK(exact_trace_moments(EnsembleKind::ReverseCirculant, n, 4).variance ==
              ipoly(n, {40, 56, 0, 0, 0, 0}));
    for (long long n : {4, 6, 8, 10})
        CHECK(exact_trace_moments(EnsembleKind::ReverseCirculant, n, 4).variance ==
              ipoly(n, {40, 112, 0, 0, 0, 0}));

    for (long long n : {3, 5, 7, 9, 11, 13})
        CHECK(exact_trace_moments(EnsembleKind::SymmetricCirculant, n, 2).variance ==
              ipoly(n, {4, -2, 0, 0}));
    for (long long n : {4, 6, 8, 10, 12})
        CHECK(exact_trace_moments(EnsembleKind::SymmetricCirculant, n, 2).variance ==
              ipoly(n, {4, -4, 0, 0}));
    for (long long n : {5, 7, 9, 11, 17, 33})
        CHECK(exact_trace_moments(EnsembleKind::SymmetricCirculant, n, 3).variance ==
              ipoly(n, {21, 18, -24, 0, 0}));

    // Hankel traces have no in-scope closed-form limit, but their p = 2
    // variance is exactly (4n^3 + 2n) / 3 at every n.
    for (long long n : {3, 4, 5, 6, 7, 8, 9, 12}) {
        BigInt num = ipoly(n, {4, 0, 2, 0});
        REQUIRE(num % 3 == 0);
        CHECK(exact_trace_moments(EnsembleKind::Hankel, n, 2).variance == num / 3);
    }
}

TEST_CASE("exact ratios approach the matching closed forms", "[limits]") {
    CHECK(exact_variance(EnsembleKind::Circulant, 64, 2) / std::pow(64.0, 3) ==
          Catch::Approx(2.0));
    double c3 = exact_variance(EnsembleKind::Circulant, 64, 3) / std::pow(64.0, 4);
    CHECK(std::abs(c3 - 6.0) / 6.0 < 0.15);
    CHECK(exact_variance(EnsembleKind::ReverseCirculant, 64, 2) / std::pow(64.0, 3) ==
          Catch::Approx(2.0));
}

TEST_CASE("exact ratios expose the divergent closed forms", "[limits]") {
    // The even-power reverse-circulant ratios settle on 40, not on the
    // closed form 112/3; the gap to 40 shrinks with n while the closed form
    // stays farther away.
    double closed_rc = limit_var_reverse_circulant(2).value;
    double prev_gap = std::numeric_limits<double>::infinity();
    double ratio33 = 0.0;
    for (long long n : {9, 17, 33}) {
        double ratio = exact_variance(EnsembleKind::ReverseCirculant, n, 4) /
                       std::pow(static_cast<double>(n), 5);
        double gap = std::abs(ratio - 40.0);
        REQUIRE(gap < prev_gap);
        prev_gap = gap;
        ratio33 = ratio;
    }
    CHECK(prev_gap / 40.0 < 0.05);
    CHECK(std::abs(ratio33 - closed_rc) > prev_gap);

    // The odd-power symmetric-circulant ratios settle on 21, not on the
    // closed form 15.
    double sc3 = exact_variance(EnsembleKind::SymmetricCirculant, 33, 3) / std::pow(33.0, 4);
    CHECK(std::abs(sc3 - 21.0) / 21.0 < 0.03);
    CHECK(std::abs(sc3 - 15.0) / 15.0 > 0.40);

    // The even-power symmetric-circulant ratios settle on 4, far above the
    // closed form 1/2 under either exponent reading.
    double sc2 = exact_variance(EnsembleKind::SymmetricCirculant, 12, 2) / std::pow(12.0, 3);
    CHECK(sc2 > 3.0);
    CHECK(limit_var_symmetric_circulant(2).value < 1.0);
}

TEST_CASE("enumeration refuses oversized instances", "[limits]") {
    CHECK_THROWS_AS(exact_trace_moments(EnsembleKind::Circulant, 50, 5), ResourceError);
    CHECK_THROWS_AS(brute_card(CardFamily::B, 5, 0, 20), ResourceError);
    CHECK_THROWS_AS(card_A(0, 0, 5), InvalidArgumentError);
    CHECK_THROWS_AS(card_A(2, 0, 0), InvalidDimensionError);
    CHECK_THROWS_AS(card_B_k(3, 4, 10), InvalidArgumentError);
    CHECK_THROWS_AS(card_B_k(3, -1, 10), InvalidArgumentError);
}
