#pragma once

// Symmetric polynomials in the monomial basis with exact rational
// coefficients, and Jack polynomials P_lambda^{(alpha)} obtained as the
// dominance-triangular eigenfunctions of the Laplace-Beltrami type operator
//
//   D = (alpha/2) sum_i x_i^2 d_i^2 + sum_{i != j} x_i^2 / (x_i - x_j) d_i.
//
// At alpha = 2 these are the zonal polynomials.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"
#include "partition.hpp"

namespace lyapinv {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

template <class T>
T convert_rational(const Rational& q) {
    if constexpr (std::is_same_v<T, Rational>) return q;
    else return static_cast<T>(q.convert_to<double>());
}

/// Which scalar multiple of the Jack family a stored polynomial uses.
enum class JackNormalization {
    None,  ///< not a Jack polynomial
    P,     ///< coefficient of m_lambda equal to 1
};

/// Homogeneous symmetric polynomial in `nvars` variables, sum_mu c_mu m_mu.
struct SymPolyM {
    int nvars = 0;
    std::map<Partition, Rational> coeffs;
    JackNormalization normalization = JackNormalization::None;
    Rational alpha = 0;  ///< Jack parameter when normalization != None

    Rational coeff(const Partition& mu) const {
        auto it = coeffs.find(mu);
        return it == coeffs.end() ? Rational(0) : it->second;
    }

    /// e.g. "m[2] + 2/3 m[1,1]", terms in decreasing lexicographic order.
    std::string str() const {
        std::string s;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            const auto& [mu, c] = *it;
            if (c == 0) continue;
            Rational a = c;
            if (s.empty()) {
                if (a < 0) s += "-";
            } else {
                s += a < 0 ? " - " : " + ";
            }
            if (a < 0) a = -a;
            if (a != 1) s += a.str() + " ";
            s += "m" + mu.str();
        }
        return s.empty() ? "0" : s;
    }
};

namespace detail {

/// mu padded with zeros to n entries, ascending (first permutation in
/// std::next_permutation order).
inline std::vector<int> padded_ascending(const Partition& mu, std::size_t n) {
    std::vector<int> e(n, 0);
    std::copy(mu.parts().begin(), mu.parts().end(), e.begin());
    std::sort(e.begin(), e.end());
    return e;
}

}  // namespace detail

/// m_mu(x): sum of x^a over the distinct rearrangements a of mu padded to N.
template <class T>
T monomial_eval(const Partition& mu, std::span<const T> x) {
    const std::size_t n = x.size();
    if (mu.length() > n) return T(0);
    const int top = mu.empty() ? 0 : mu[0];
    std::vector<std::vector<T>> pw(n, std::vector<T>(top + 1));
    for (std::size_t i = 0; i < n; ++i) {
        pw[i][0] = T(1);
        for (int e = 1; e <= top; ++e) pw[i][e] = pw[i][e - 1] * x[i];
    }
    auto e = detail::padded_ascending(mu, n);
    T total(0);
    do {
        T term(1);
        for (std::size_t i = 0; i < n; ++i)
            if (e[i]) term *= pw[i][e[i]];
        total += term;
    } while (std::next_permutation(e.begin(), e.end()));
    return total;
}

/// m_mu(1, ..., 1) with N ones: number of distinct rearrangements.
inline Integer monomial_count(const Partition& mu, std::size_t n) {
    if (mu.length() > n) return 0;
    // N! / ((N - l)! prod mult_i!)
    Integer num = 1;
    for (std::size_t i = n - mu.length() + 1; i <= n; ++i) num *= i;
    Integer den = 1;
    const auto& p = mu.parts();
    for (std::size_t i = 0; i < p.size();) {
        std::size_t j = i;
        while (j < p.size() && p[j] == p[i]) ++j;
        for (std::size_t f = 2; f <= j - i; ++f) den *= f;
        i = j;
    }
    return num / den;
}

/// Evaluates p at a point with p.nvars coordinates.
template <class T>
T eval_sympoly(const SymPolyM& p, std::span<const T> point) {
    if (static_cast<int>(point.size()) != p.nvars) throw InvalidPoint("eval_sympoly: point has wrong length");
    T total(0);
    for (const auto& [mu, c] : p.coeffs)
        if (c != 0) total += convert_rational<T>(c) * monomial_eval<T>(mu, point);
    return total;
}

inline double eval_sympoly(const SymPolyM& p, const std::vector<double>& point) {
    return eval_sympoly<double>(p, std::span<const double>(point));
}

/// p(1, ..., 1), exactly.
inline Rational eval_at_ones(const SymPolyM& p) {
    Rational total = 0;
    for (const auto& [mu, c] : p.coeffs) total += c * Rational(monomial_count(mu, p.nvars));
    return total;
}

namespace detail {

/// Eigenvalue of D on m_mu's leading term in N variables.
inline Rational laplace_beltrami_eigenvalue(const Partition& mu, const Rational& alpha, int n) {
    Rational e = 0;
    for (std::size_t i = 0; i < mu.length(); ++i) {
        const int m = mu[i];
        e += alpha * Rational(m * (m - 1), 2) + Rational((n - 1 - static_cast<int>(i)) * m);
    }
    return e;
}

/// For each partition mu that D maps onto m_nu, calls visit(mu, coefficient).
/// Such mu are obtained from nu by pushing two parts apart: (nu_i, nu_j) ->
/// (p, q) with p + q = nu_i + nu_j and q < min(nu_i, nu_j); the coefficient
/// contributed is p - q.
template <class Visit>
void laplace_beltrami_preimages(const Partition& nu, Visit visit) {
    const auto& parts = nu.parts();
    const std::size_t len = parts.size();
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = i + 1; j < len; ++j) {
            const int lo = std::min(parts[i], parts[j]);
            const int s = parts[i] + parts[j];
            for (int q = 0; q < lo; ++q) {
                const int p = s - q;
                std::vector<int> mu;
                mu.reserve(len);
                for (std::size_t t = 0; t < len; ++t)
                    if (t != i && t != j) mu.push_back(parts[t]);
                mu.push_back(p);
                if (q > 0) mu.push_back(q);
                std::sort(mu.begin(), mu.end(), std::greater<>());
                visit(Partition(std::move(mu)), p - q);
            }
        }
}

inline SymPolyM compute_jack_p(const Partition& lambda, const Rational& alpha, int n) {
    SymPolyM out;
    out.nvars = n;
    out.normalization = JackNormalization::P;
    out.alpha = alpha;
    out.coeffs[lambda] = 1;
    const Rational top = laplace_beltrami_eigenvalue(lambda, alpha, n);
    // Reverse lexicographic order is a linear extension of dominance, so every
    // preimage of nu is already settled when nu is reached.
    for (const auto& nu : partitions_of(lambda.weight(), n)) {
        if (!(nu < lambda)) continue;
        Rational acc = 0;
        laplace_beltrami_preimages(nu, [&](const Partition& mu, int c) {
            auto it = out.coeffs.find(mu);
            if (it != out.coeffs.end()) acc += it->second * c;
        });
        if (acc == 0) continue;
        const Rational gap = top - laplace_beltrami_eigenvalue(nu, alpha, n);
        if (gap == 0) throw Error("jack_in_monomials: zero eigenvalue gap");
        out.coeffs[nu] = acc / gap;
    }
    return out;
}

class JackCache {
public:
    static JackCache& instance() {
        static JackCache cache;
        return cache;
    }

    SymPolyM get(const Partition& lambda, const Rational& alpha, int n) {
        Key key{lambda, alpha, n};
        {
            std::shared_lock lock(mutex_);
            auto it = table_.find(key);
            if (it != table_.end()) return it->second;
        }
        SymPolyM p = compute_jack_p(lambda, alpha, n);
        std::unique_lock lock(mutex_);
        return table_.emplace(std::move(key), std::move(p)).first->second;
    }

private:
    using Key = std::tuple<Partition, Rational, int>;
    std::shared_mutex mutex_;
    std::map<Key, SymPolyM> table_;
};

}  // namespace detail

/// Jack polynomial P_lambda^{(alpha)} in N variables, monomial basis, exact.
/// Normalised so that the coefficient of m_lambda is 1; all other nonzero
/// coefficients sit on partitions strictly dominated by lambda.
inline SymPolyM jack_in_monomials(const Partition& lambda, const Rational& alpha, int n) {
    if (n < 0 || lambda.length() > static_cast<std::size_t>(n))
        throw InvalidPartition("jack_in_monomials: partition has more parts than variables");
    if (alpha <= 0) throw Error("jack_in_monomials: alpha must be positive");
    return detail::JackCache::instance().get(lambda, alpha, n);
}

}  // namespace lyapinv
