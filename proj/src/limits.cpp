#include "patmat/limits.hpp"

#include <algorithm>
#include <cstring>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "patmat/ensembles.hpp"
#include "patmat/errors.hpp"

namespace patmat {

namespace {

using Float50 = boost::multiprecision::cpp_bin_float_50;

BigInt binomial(const BigInt& top, int k) {
    if (k < 0 || top < 0 || top < k) {
        return 0;
    }
    BigInt result = 1;
    for (int i = 1; i <= k; ++i) {
        result *= top - k + i;
        result /= i;
    }
    return result;
}

BigInt binomial_ll(long long top, int k) { return binomial(BigInt(top), k); }

BigInt factorial(int k) {
    BigInt result = 1;
    for (int i = 2; i <= k; ++i) {
        result *= i;
    }
    return result;
}

BigInt ipow(long long base, int exp) {
    if (exp == 0) {
        return 1; // includes 0^0, the empty product
    }
    BigInt result = 1;
    BigInt b = base;
    for (int i = 0; i < exp; ++i) {
        result *= b;
    }
    return result;
}

void require_order(int p) {
    if (p < 1) {
        throw InvalidArgumentError("order p must be >= 1");
    }
}

void require_dimension(Eigen::Index n) {
    if (n < 1) {
        throw InvalidDimensionError("dimension n must be >= 1");
    }
}

BigRational h_rational(int p, int k) {
    if (k < 0 || k > p) {
        throw InvalidArgumentError("h_p(k) needs 0 <= k <= p");
    }
    if (p == 1) {
        // The alternating sum below degenerates at p = 1; the fraction of
        // constrained tuples is O(1/n) there, so the limit is 0.
        return BigRational(0);
    }
    // Sum over integer shifts s of the signed count of lattice points of a
    // sliced cube, i.e. the density of a sum of p centered uniforms evaluated
    // on a half-integer grid determined by the parity of p - k.
    BigInt numerator = 0;
    // 2s + p - k ranges over non-negative values of fixed parity.
    int lo = -((p - k + 1) / 2);
    int hi = k / 2;
    for (int s = lo; s <= hi; ++s) {
        int t = 2 * s + p - k;
        if (t < 0) {
            continue;
        }
        for (int q = 0; q <= t; ++q) {
            BigInt term = binomial_ll(p, q) * ipow(t - q, p - 1);
            if (q % 2 == 0) {
                numerator += term;
            } else {
                numerator -= term;
            }
        }
    }
    // Each power ((t - q) / 2)^(p - 1) contributes 2^-(p-1).
    BigRational value(numerator, ipow(2, p - 1) * factorial(p - 1));
    return value;
}

BigRational g_rational(int k) {
    // Variance contribution of a length-2k cycle whose eigenvalue-index sums
    // wrap; k = 1 is the non-wrapping base case pinned to 2.
    if (k == 1) {
        return BigRational(2);
    }
    BigInt total = 0;
    BigInt kfact = factorial(k);
    for (int s = -(k - 1); s <= k - 1; ++s) {
        BigInt inner = 0;
        for (int j = 0; j <= k + s - 1; ++j) {
            BigInt term = binomial_ll(2 * k, j) * ipow(k + s - j, 2 * k - 1);
            if (j % 2 == 0) {
                inner += term;
            } else {
                inner -= term;
            }
        }
        int weight = (s == 0) ? 1 : 2;
        total += weight * inner;
    }
    return BigRational(total * kfact * kfact, factorial(2 * k - 1));
}

double to_double(const BigRational& value) { return value.convert_to<double>(); }

BigInt i128_to_bigint(__int128 value) {
    bool negative = value < 0;
    unsigned __int128 magnitude =
        negative ? -static_cast<unsigned __int128>(value) : static_cast<unsigned __int128>(value);
    BigInt result = static_cast<std::uint64_t>(magnitude >> 64);
    result <<= 64;
    result += static_cast<std::uint64_t>(magnitude);
    return negative ? BigInt(-result) : result;
}

// Gaussian moment E[Z^e]: zero for odd e, (e-1)!! for even e.
std::vector<long long> gaussian_moments(int max_order) {
    std::vector<long long> table(static_cast<std::size_t>(max_order) + 1, 0);
    table[0] = 1;
    for (int e = 2; e <= max_order; e += 2) {
        table[static_cast<std::size_t>(e)] = table[static_cast<std::size_t>(e - 2)] * (e - 1);
    }
    return table;
}

// Expectation of a product of standard gaussians indexed by two sorted
// multisets of slot offsets. Equal offsets refer to the same variable.
long long merged_moment(const std::int32_t* a, int alen, const std::int32_t* b, int blen,
                        const std::vector<long long>& moments) {
    long long mu = 1;
    int ia = 0;
    int ib = 0;
    while (ia < alen || ib < blen) {
        std::int32_t value;
        if (ia < alen && (ib >= blen || a[ia] <= b[ib])) {
            value = a[ia];
        } else {
            value = b[ib];
        }
        int run = 0;
        while (ia < alen && a[ia] == value) {
            ++ia;
            ++run;
        }
        while (ib < blen && b[ib] == value) {
            ++ib;
            ++run;
        }
        if (run % 2 != 0) {
            return 0;
        }
        mu *= moments[static_cast<std::size_t>(run)];
    }
    return mu;
}

} // namespace

std::string family_name(CardFamily family) {
    switch (family) {
    case CardFamily::A:
        return "A";
    case CardFamily::B:
        return "B";
    case CardFamily::Bk:
        return "Bk";
    }
    throw InvalidArgumentError("unknown cardinality family");
}

CardFamily parse_family(const std::string& name) {
    if (name == "A" || name == "a") {
        return CardFamily::A;
    }
    if (name == "B" || name == "b") {
        return CardFamily::B;
    }
    if (name == "Bk" || name == "bk" || name == "BK") {
        return CardFamily::Bk;
    }
    throw InvalidArgumentError("unknown cardinality family '" + name + "'");
}

double irwin_hall_density(int p, double x) {
    require_order(p);
    // Density of a sum of p independent uniforms on [0, 1].
    if (x <= 0.0 || x >= static_cast<double>(p)) {
        return 0.0;
    }
    // Alternating binomial sum; evaluated in wide precision because the terms
    // cancel catastrophically for moderate p.
    Float50 sum = 0;
    Float50 xf = x;
    for (int k = 0; k <= p; ++k) {
        Float50 base = xf - k;
        if (base <= 0) {
            break;
        }
        Float50 term = binomial_ll(p, k).convert_to<Float50>() * pow(base, p - 1);
        if (k % 2 == 0) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum /= factorial(p - 1).convert_to<Float50>();
    return sum.convert_to<double>();
}

CardinalityResult card_A(int p, long long s, Eigen::Index n) {
    require_order(p);
    require_dimension(n);
    CardinalityResult result{CardFamily::A, p, s, n, 0, true};
    if (s < 0 || s > p - 1) {
        result.in_range = false;
        return result;
    }
    // Tuples in {0..n-1}^p with coordinate sum s*n, by inclusion-exclusion
    // over coordinates pushed past n.
    BigInt count = 0;
    for (long long k = 0; k <= s; ++k) {
        BigInt term = binomial_ll(p, static_cast<int>(k)) *
                      binomial((s - k) * n + p - 1, p - 1);
        if (k % 2 == 0) {
            count += term;
        } else {
            count -= term;
        }
    }
    result.count = count;
    return result;
}

CardinalityResult card_B(int p, long long s, Eigen::Index n) {
    require_order(p);
    require_dimension(n);
    CardinalityResult result{CardFamily::B, p, s, n, 0, true};
    if (s < -(p - 1) || s > p - 1) {
        result.in_range = false;
        return result;
    }
    // Tuples in {1..n}^(2p) whose alternating sum is s*n. Substituting
    // y = j - 1 on the positive positions and y = n - j on the negated ones
    // turns this into a plain composition count with target (p + s)*n - p.
    BigInt count = 0;
    for (long long k = 0; k <= p + s - 1; ++k) {
        BigInt term = binomial_ll(2 * p, static_cast<int>(k)) *
                      binomial((p + s - k) * n + p - 1, 2 * p - 1);
        if (k % 2 == 0) {
            count += term;
        } else {
            count -= term;
        }
    }
    result.count = count;
    return result;
}

BigInt card_B_k_s(int p, int k, long long s, Eigen::Index n) {
    require_order(p);
    require_dimension(n);
    if (k < 0 || k > p) {
        throw InvalidArgumentError("sign split k needs 0 <= k <= p");
    }
    long long m = static_cast<long long>(n) / 2;
    if (m == 0) {
        return 0;
    }
    // Tuples in {1..m}^p whose first k coordinates enter positively and the
    // rest negatively, with signed sum s*n. Shift to {0..m-1}^p; the target
    // becomes t below, counted by inclusion-exclusion over coordinates >= m.
    long long t = s * static_cast<long long>(n) - k + m * static_cast<long long>(p - k);
    if (t < 0 || t > static_cast<long long>(p) * (m - 1)) {
        return 0;
    }
    BigInt count = 0;
    for (long long q = 0; q <= std::min<long long>(p, t / m); ++q) {
        BigInt term = binomial_ll(p, static_cast<int>(q)) *
                      binomial(t - q * m + p - 1, p - 1);
        if (q % 2 == 0) {
            count += term;
        } else {
            count -= term;
        }
    }
    return count;
}

CardinalityResult card_B_k(int p, int k, Eigen::Index n) {
    require_order(p);
    require_dimension(n);
    if (k < 0 || k > p) {
        throw InvalidArgumentError("sign split k needs 0 <= k <= p");
    }
    CardinalityResult result{CardFamily::Bk, p, k, n, 0, true};
    BigInt count = 0;
    for (long long s = -static_cast<long long>(p); s <= p; ++s) {
        count += card_B_k_s(p, k, s, n);
    }
    result.count = count;
    return result;
}

double h_limit(int p, int k) {
    require_order(p);
    return to_double(h_rational(p, k));
}

double g_const(int k) {
    if (k < 1) {
        throw InvalidArgumentError("g(k) needs k >= 1");
    }
    return to_double(g_rational(k));
}

LimitValue limit_var_circulant(int p) {
    require_order(p);
    // p! * sum_s f_p(s) over integer points, with f_p evaluated through its
    // exact alternating numerator so the result is an exact integer.
    BigInt numerator = 0;
    for (int s = 0; s <= p - 1; ++s) {
        for (int k = 0; k <= s; ++k) {
            BigInt term = binomial_ll(p, k) * ipow(s - k, p - 1);
            if (k % 2 == 0) {
                numerator += term;
            } else {
                numerator -= term;
            }
        }
    }
    BigRational value(factorial(p) * numerator, factorial(p - 1));
    return LimitValue{EnsembleKind::Circulant, p, to_double(value), "any"};
}

LimitValue limit_var_reverse_circulant(int p) {
    require_order(p);
    // Variance limit for the order-2p trace statistic: cycles split by how
    // many eigenvalue magnitudes they visit twice.
    BigRational total = 0;
    for (int k = 1; k <= p; ++k) {
        BigInt root = binomial_ll(p, p - k) * binomial_ll(p, p - k) * factorial(p - k);
        BigRational coefficient(root * root);
        BigRational gk = (k == 1) ? BigRational(2) : g_rational(k);
        total += coefficient * gk;
    }
    return LimitValue{EnsembleKind::ReverseCirculant, p, to_double(total), "even"};
}

LimitValue limit_var_symmetric_circulant(int p, ScEvenScaling scaling) {
    require_order(p);
    if (p % 2 == 1) {
        int m = (p - 1) / 2;
        BigInt lead = BigInt(p) * binomial_ll(2 * m, m) * factorial(m);
        BigRational total(lead * lead, ipow(2, 2 * m));
        for (int k = 1; k <= m; ++k) {
            BigInt root =
                binomial_ll(2 * m + 1, 2 * m - 2 * k) * binomial_ll(2 * m - 2 * k, m - k) *
                factorial(m - k);
            BigRational a_k(root * root, ipow(2, 2 * (m - k)));
            BigRational inner = 0;
            int order = 2 * k + 1;
            for (int l = 0; l <= order; ++l) {
                BigInt weight =
                    binomial_ll(order, l) * binomial_ll(order, l) * factorial(l) *
                    factorial(order - l);
                inner += BigRational(weight) * h_rational(order, l);
            }
            total += a_k * inner;
        }
        return LimitValue{EnsembleKind::SymmetricCirculant, p, to_double(total), "odd"};
    }
    int m = p / 2;
    BigRational total = 0;
    for (int k = 2; k <= m; ++k) {
        BigInt root =
            binomial_ll(2 * m, 2 * m - 2 * k) * binomial_ll(2 * m - 2 * k, m - k) *
            factorial(m - k);
        int exponent = (scaling == ScEvenScaling::DoubleExponent) ? 2 * (m - k) : m - k;
        BigRational b_k(root * root, ipow(2, exponent));
        int order = 2 * k;
        BigRational inner = 0;
        for (int l = 0; l <= order; ++l) {
            if (l == k) {
                continue;
            }
            BigInt weight =
                binomial_ll(order, l) * binomial_ll(order, l) * factorial(l) *
                factorial(order - l);
            inner += BigRational(weight) * h_rational(order, l);
        }
        BigInt central = binomial_ll(order, k) * binomial_ll(order, k);
        inner += BigRational(central) * g_rational(k);
        total += b_k * inner;
    }
    BigInt root1 = binomial_ll(2 * m, 2 * m - 2) * binomial_ll(2 * m - 2, m - 1) * factorial(m - 1);
    total += BigRational(root1 * root1, ipow(2, 2 * m - 1));
    return LimitValue{EnsembleKind::SymmetricCirculant, p, to_double(total), "even"};
}

CardinalityResult brute_card(CardFamily family, int p, long long s_or_k, Eigen::Index n) {
    require_order(p);
    require_dimension(n);
    auto enumerate = [](Eigen::Index lo, Eigen::Index hi, int len, auto&& visit) {
        std::vector<Eigen::Index> tuple(static_cast<std::size_t>(len), lo);
        for (;;) {
            visit(tuple);
            int pos = len - 1;
            while (pos >= 0) {
                if (++tuple[static_cast<std::size_t>(pos)] <= hi) {
                    break;
                }
                tuple[static_cast<std::size_t>(pos)] = lo;
                --pos;
            }
            if (pos < 0) {
                return;
            }
        }
    };
    auto check_budget = [](double count) {
        if (count > 1e8) {
            throw ResourceError("brute-force enumeration budget exceeded");
        }
    };

    CardinalityResult result{family, p, s_or_k, n, 0, true};
    BigInt count = 0;
    switch (family) {
    case CardFamily::A: {
        check_budget(std::pow(static_cast<double>(n), p));
        long long target = s_or_k * static_cast<long long>(n);
        enumerate(0, n - 1, p, [&](const std::vector<Eigen::Index>& tuple) {
            long long sum = 0;
            for (Eigen::Index v : tuple) {
                sum += v;
            }
            if (sum == target) {
                ++count;
            }
        });
        break;
    }
    case CardFamily::B: {
        check_budget(std::pow(static_cast<double>(n), 2 * p));
        long long target = s_or_k * static_cast<long long>(n);
        enumerate(1, n, 2 * p, [&](const std::vector<Eigen::Index>& tuple) {
            long long sum = 0;
            for (std::size_t i = 0; i < tuple.size(); ++i) {
                sum += (i % 2 == 0) ? tuple[i] : -tuple[i];
            }
            if (sum == target) {
                ++count;
            }
        });
        break;
    }
    case CardFamily::Bk: {
        int k = static_cast<int>(s_or_k);
        if (k < 0 || k > p) {
            throw InvalidArgumentError("sign split k needs 0 <= k <= p");
        }
        Eigen::Index m = n / 2;
        if (m == 0) {
            break;
        }
        check_budget(std::pow(static_cast<double>(m), p));
        enumerate(1, m, p, [&](const std::vector<Eigen::Index>& tuple) {
            long long sum = 0;
            for (std::size_t i = 0; i < tuple.size(); ++i) {
                sum += (static_cast<int>(i) < k) ? tuple[i] : -tuple[i];
            }
            if (sum % static_cast<long long>(n) == 0) {
                ++count;
            }
        });
        break;
    }
    }
    result.count = count;
    return result;
}

ExactTraceMoments exact_trace_moments(EnsembleKind kind, Eigen::Index n, int p) {
    require_order(p);
    require_dimension(n);
    double tuples = std::pow(static_cast<double>(n), p);
    if (tuples > 4.5e7) {
        throw ResourceError("trace expansion budget exceeded: n^p too large");
    }

    // Expand Tr(A^p) = sum over cyclic index tuples of a product of input
    // slots; collect the distinct monomials with integer multiplicities.
    std::unordered_map<std::string, long long> monomials;
    std::vector<Eigen::Index> index(static_cast<std::size_t>(p), 1);
    std::vector<std::int32_t> offsets(static_cast<std::size_t>(p), 0);
    std::string key(static_cast<std::size_t>(p) * sizeof(std::int32_t), '\0');
    for (;;) {
        for (int t = 0; t < p; ++t) {
            Eigen::Index i = index[static_cast<std::size_t>(t)];
            Eigen::Index j = index[static_cast<std::size_t>((t + 1) % p)];
            offsets[static_cast<std::size_t>(t)] = static_cast<std::int32_t>(entry_offset(kind, n, i, j));
        }
        std::sort(offsets.begin(), offsets.end());
        std::memcpy(key.data(), offsets.data(), key.size());
        ++monomials[key];

        int pos = p - 1;
        while (pos >= 0) {
            if (++index[static_cast<std::size_t>(pos)] <= n) {
                break;
            }
            index[static_cast<std::size_t>(pos)] = 1;
            --pos;
        }
        if (pos < 0) {
            break;
        }
    }

    std::size_t distinct = monomials.size();
    if (static_cast<double>(distinct) * static_cast<double>(distinct) > 4.0e8) {
        throw ResourceError("trace expansion budget exceeded: too many distinct monomials");
    }

    std::vector<std::vector<std::int32_t>> keys;
    std::vector<long long> weights;
    keys.reserve(distinct);
    weights.reserve(distinct);
    for (const auto& item : monomials) {
        std::vector<std::int32_t> decoded(static_cast<std::size_t>(p));
        std::memcpy(decoded.data(), item.first.data(), item.first.size());
        keys.push_back(std::move(decoded));
        weights.push_back(item.second);
    }

    std::vector<long long> moments = gaussian_moments(2 * p);

    __int128 first = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        long long mu = merged_moment(keys[i].data(), p, nullptr, 0, moments);
        if (mu != 0) {
            first += static_cast<__int128>(weights[i]) * mu;
        }
    }

    __int128 second = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        for (std::size_t j = i; j < keys.size(); ++j) {
            long long mu = merged_moment(keys[i].data(), p, keys[j].data(), p, moments);
            if (mu == 0) {
                continue;
            }
            __int128 contribution = static_cast<__int128>(weights[i]) * weights[j] * mu;
            second += (i == j) ? contribution : 2 * contribution;
        }
    }

    ExactTraceMoments result;
    result.mean = i128_to_bigint(first);
    result.variance = i128_to_bigint(second) - result.mean * result.mean;
    return result;
}

double exact_variance(EnsembleKind kind, Eigen::Index n, int p) {
    return exact_trace_moments(kind, n, p).variance.convert_to<double>();
}

} // namespace patmat
