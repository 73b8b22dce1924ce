#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "patmat/ensembles.hpp"

namespace patmat {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Constrained index families counted here and by brute force:
///   A  - p-tuples over 0..n-1 with a fixed total sum s*n
///   B  - 2p-tuples over 1..n with alternating sum s*n
///   Bk - p-tuples over 1..floor(n/2) whose first k entries count positive
///        and the rest negative, signed sum divisible by n
enum class CardFamily { A, B, Bk };

[[nodiscard]] std::string family_name(CardFamily family);
[[nodiscard]] CardFamily parse_family(const std::string& name);

struct CardinalityResult {
    CardFamily family = CardFamily::A;
    int p = 1;
    long long s = 0; // s for A/B, k for Bk
    Eigen::Index n = 1;
    BigInt count;
    bool in_range = true;
};

/// Density of the sum of p independent uniform[0,1] variables.
[[nodiscard]] double irwin_hall_density(int p, double x);

/// |{(i_1..i_p) : i_1+...+i_p = s*n, 0 <= i_j <= n-1}| in closed form.
[[nodiscard]] CardinalityResult card_A(int p, long long s, Eigen::Index n);

/// |{(i_1..i_2p) : sum (-1)^j i_j = s*n, 1 <= i_j <= n}| in closed form.
/// The argument p is the half-order: tuples have 2p positions.
[[nodiscard]] CardinalityResult card_B(int p, long long s, Eigen::Index n);

/// |{(j_1..j_p) in [1, floor(n/2)]^p : j_1+..+j_k - j_{k+1}-..-j_p = 0 mod n}|.
[[nodiscard]] CardinalityResult card_B_k(int p, int k, Eigen::Index n);

/// Same family with the signed sum pinned to exactly s*n.
[[nodiscard]] BigInt card_B_k_s(int p, int k, long long s, Eigen::Index n);

/// h_p(k): limit of card_B_k(p, k, n) / n^(p-1); exact rational internally.
[[nodiscard]] double h_limit(int p, int k);

/// Weight of order-2k magnitude pairings in even-power limits. g(1) is pinned
/// to 2 (the value the k=1 contribution actually carries); the alternating
/// closed form applies from k = 2 on.
[[nodiscard]] double g_const(int k);

struct LimitValue {
    EnsembleKind kind = EnsembleKind::Circulant;
    int p = 1;
    double value = 0.0;
    // Parity branch of p the value belongs to: "odd" or "even" for the
    // symmetric circulant, "even" for the reverse circulant (the statistic is
    // the order-2p trace), "any" for the circulant.
    std::string parity;
};

/// lim Var[Tr(C_n^p)] / n^(p+1) = p! * sum_s f_p(s); an exact integer.
[[nodiscard]] LimitValue limit_var_circulant(int p);

/// lim Var[Tr(RC_n^(2p))] / n^(2p+1); argument p is the half-order of the
/// trace power.
[[nodiscard]] LimitValue limit_var_reverse_circulant(int p);

/// The even-power symmetric-circulant closed form admits two candidate
/// exponents for the interior halving factor, 2^(2(m-k)) versus 2^(m-k);
/// simulation experiments arbitrate between them. Both coincide for p <= 5.
enum class ScEvenScaling { DoubleExponent, SingleExponent };

/// lim Var[Tr(SC_n^p)] / n^(p+1), dispatching on the parity of p.
[[nodiscard]] LimitValue limit_var_symmetric_circulant(
    int p, ScEvenScaling scaling = ScEvenScaling::DoubleExponent);

/// Direct enumeration oracle for the three families. s_or_k is s for A/B and
/// k for Bk. Refuses instances whose tuple count exceeds the budget.
[[nodiscard]] CardinalityResult brute_card(CardFamily family, int p, long long s_or_k,
                                           Eigen::Index n);

/// Exact mean and variance of Tr(A_n^p) over the Gaussian input sequence,
/// by collapsing the trace expansion into monomials and applying moment
/// factors (e-1)!! slot by slot. Integer-exact throughout.
struct ExactTraceMoments {
    BigInt mean;
    BigInt variance;
};

[[nodiscard]] ExactTraceMoments exact_trace_moments(EnsembleKind kind, Eigen::Index n, int p);

[[nodiscard]] double exact_variance(EnsembleKind kind, Eigen::Index n, int p);

} // namespace patmat
