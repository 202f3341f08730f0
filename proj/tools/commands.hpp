#pragma once

// The lyapinv-cli subcommands. Each takes fully resolved options and returns
// a Report; the executable only parses flags and serialises.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cli_support.hpp"

namespace lyapinv::cli {

struct CommonOptions {
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct JackOptions {
    std::string partition;
    std::string alpha = "2";
    int nvars = 0;  ///< 0: number of parts of the partition
};

struct JmatOptions {
    int k = 0;
    int n = 0;
    std::string b1;
    std::string b2;
    std::string u = "0.5,1,2";
    std::size_t nsamples = 10000;
    std::string paper_example;
};

struct LyapOptions {
    std::string model;
    int n = 0;
    std::size_t m = 10000;
    std::string k;  ///< comma list; empty means 1..n-1
    std::size_t nsamples = 10000;
};

struct VerifyOptions {
    std::string model;
    int n = 0;
    std::string k;
    std::size_t nsamples = 10000;
};

struct ReproOptions {
    bool mc_confirm = false;
    std::size_t nsamples = 100000;
};

namespace detail {

inline std::string num(double v) { return format_double(v); }

inline std::vector<std::size_t> k_list(const std::string& spec, Eigen::Index n) {
    std::vector<std::size_t> ks;
    if (trim(spec).empty()) {
        for (Eigen::Index k = 1; k < n; ++k) ks.push_back(static_cast<std::size_t>(k));
        return ks;
    }
    for (const auto& part : split(spec, ',')) {
        const auto k = parse_u64(part);
        if (k < 1 || k >= static_cast<std::uint64_t>(n))
            throw UsageError("k must lie in 1.." + std::to_string(n - 1) + ", got " + part);
        ks.push_back(static_cast<std::size_t>(k));
    }
    return ks;
}

inline Matrix diag_matrix(std::initializer_list<double> d) {
    Vector v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) v[i++] = x;
    return v.asDiagonal();
}

/// One term of c_j written as a product of normalized zonal polynomials in
/// the squared singular values b^2 of B2 and the reciprocals a^-2 of B1.
inline std::string symbolic_term(const Partition& lambda, int k, int m) {
    const SymPolyM p2 = jack_in_monomials(lambda.conjugate().halved(), kZonalAlpha, m);
    const SymPolyM p1 = jack_in_monomials(lambda.halved(), kZonalAlpha, k);
    const Rational scale = 1 / (eval_at_ones(p2) * eval_at_ones(p1));
    auto factor = [](const SymPolyM& p, const char* var) {
        const std::string body = p.str();
        const bool single = p.coeffs.size() == 1;
        return (single ? body : "(" + body + ")") + "(" + var + ")";
    };
    std::string s = scale == 1 ? "" : scale.str() + " * ";
    return s + factor(p2, "b^2") + " * " + factor(p1, "a^-2");
}

inline std::vector<std::string> symbolic_coefficients(int k, int m) {
    std::vector<std::string> out;
    for (int j = 0; j <= k * m; ++j) {
        if (j == 0) {
            out.push_back("1");
            continue;
        }
        const auto parts = contributing_partitions(j, k, m);
        if (parts.empty()) {
            out.push_back("0");
            continue;
        }
        std::string s;
        for (const auto& lambda : parts) s += (s.empty() ? "" : " + ") + symbolic_term(lambda, k, m);
        out.push_back(s);
    }
    return out;
}

inline Rational small_rational(RngStream& rng) {
    return Rational(static_cast<long>(1 + rng() % 9), static_cast<long>(1 + rng() % 9));
}

/// 20 rational diagonal instances of the 2+2 case against 1 + b1^2 b2^2/(a1^2 a2^2) u^4.
inline bool four_two_exact_check() {
    RngStream rng(4242);
    for (int t = 0; t < 20; ++t) {
        const Rational a1 = small_rational(rng), a2 = small_rational(rng);
        const Rational b1 = small_rational(rng), b2 = small_rational(rng);
        const auto j = j_exact_rational({a1 * a1, a2 * a2}, {b1 * b1, b2 * b2});
        const std::vector<Rational> want{1, 0, 0, 0, (b1 * b1 * b2 * b2) / (a1 * a1 * a2 * a2)};
        if (j.coeffs != want) return false;
    }
    return true;
}

/// Same closed form through the floating-point path on random non-diagonal
/// matrices; returns the largest relative error.
inline double four_two_float_error() {
    RngStream rng(4243);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Matrix b1 = random_with_singular_values(log_uniform(2, 0.3, 3.0, rng), rng);
        const Matrix b2 = random_with_singular_values(log_uniform(2, 0.3, 3.0, rng), rng);
        const auto j = j_exact(b1, b2);
        const double c4 = std::pow(b2.determinant() / b1.determinant(), 2);
        worst = std::max(worst, std::abs(j.coeffs[0] - 1.0));
        for (int i : {1, 2, 3}) worst = std::max(worst, std::abs(j.coeffs[i]));
        worst = std::max(worst, std::abs(j.coeffs[4] - c4) / c4);
    }
    return worst;
}

struct SixTwoCheck {
    bool odd_and_two_mod_four_zero = true;
    double c4_error = 0.0;
    double c8_error = 0.0;
};

inline SixTwoCheck six_two_check() {
    RngStream rng(6242);
    SixTwoCheck out;
    for (int t = 0; t < 20; ++t) {
        const Vector a = log_uniform(2, 0.3, 3.0, rng);
        const Vector b = log_uniform(4, 0.3, 3.0, rng);
        const Matrix b1 = random_with_singular_values(a, rng);
        const Matrix b2 = random_with_singular_values(b, rng);
        const auto j = j_exact(b1, b2);
        for (int i : {1, 2, 3, 5, 6, 7}) out.odd_and_two_mod_four_zero &= j.coeffs[i] == 0.0;
        double e2 = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int l = i + 1; l < 4; ++l) e2 += b[i] * b[i] * b[l] * b[l];
        const double c4 = e2 / 6.0 / (a[0] * a[0] * a[1] * a[1]);
        const double c8 = std::pow(b2.determinant(), 2) / std::pow(b1.determinant(), 4);
        out.c4_error = std::max(out.c4_error, std::abs(j.coeffs[4] - c4) / c4);
        out.c8_error = std::max(out.c8_error, std::abs(j.coeffs[8] - c8) / c8);
    }
    return out;
}

inline void add_paper_example(Report& rep, const std::string& which) {
    int k = 0, m = 0;
    if (which == "4-2") {
        k = 2;
        m = 2;
    } else if (which == "6-2") {
        k = 2;
        m = 4;
    } else {
        throw UsageError("unknown paper example '" + which + "' (expected 4-2 or 6-2)");
    }
    const auto sym = symbolic_coefficients(k, m);
    for (std::size_t j = 0; j < sym.size(); ++j) {
        auto& r = rep.add(which + ".c" + std::to_string(j) + ".symbolic", 0.0);
        r.exact = sym[j];
    }
    if (which == "4-2") {
        rep.add("4-2.closed_form_exact", 20, std::nullopt, exact_verdict(four_two_exact_check()));
        const double err = four_two_float_error();
        rep.add("4-2.closed_form_float_max_rel_error", err, std::nullopt, exact_verdict(err <= 1e-10));
    } else {
        const auto c = six_two_check();
        rep.add("6-2.c2_c6_zero", 20, std::nullopt, exact_verdict(c.odd_and_two_mod_four_zero));
        rep.add("6-2.c4_max_rel_error", c.c4_error, std::nullopt, exact_verdict(c.c4_error <= 1e-10));
        rep.add("6-2.c8_max_rel_error", c.c8_error, std::nullopt, exact_verdict(c.c8_error <= 1e-10));
    }
}

}  // namespace detail

inline Report cmd_jack(const JackOptions& o) {
    Report rep;
    rep.command = "jack";
    const Partition lambda = parse_partition(o.partition);
    const Number alpha = parse_number(o.alpha);
    if (!alpha.exact) throw UsageError("alpha must be an exact rational");
    if (*alpha.exact <= 0) throw UsageError("alpha must be positive");
    const int n = o.nvars > 0 ? o.nvars : std::max<int>(1, static_cast<int>(lambda.length()));
    rep.config = {{"partition", lambda.str()}, {"alpha", alpha.exact->str()}, {"nvars", std::to_string(n)}};

    const SymPolyM p = jack_in_monomials(lambda, *alpha.exact, n);
    const Rational at_ones = eval_at_ones(p);
    auto& expansion = rep.add("P" + lambda.str() + "(1^" + std::to_string(n) + ")", convert_rational<double>(at_ones));
    expansion.exact = p.str();
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
        auto& r = rep.add("coeff m" + it->first.str(), convert_rational<double>(it->second));
        r.exact = it->second.str();
    }
    rep.notes.push_back("P" + lambda.str() + " = " + p.str());
    return rep;
}

inline Report cmd_jmat(const JmatOptions& o, const CommonOptions& common) {
    Report rep;
    rep.command = "jmat";
    rep.config = {{"seed", std::to_string(common.seed)}, {"workers", std::to_string(common.workers)}};
    if (!o.paper_example.empty()) {
        rep.config["paper-example"] = o.paper_example;
        detail::add_paper_example(rep, o.paper_example);
        if (o.b1.empty() && o.b2.empty()) return rep;
    }
    if (o.b1.empty() || o.b2.empty()) throw UsageError("jmat needs --b1 and --b2 (or --paper-example)");
    if (o.nsamples == 1) throw UsageError("nsamples must be 0 or at least 2");

    std::optional<Eigen::Index> kdim, mdim;
    if (o.k > 0) kdim = o.k;
    if (o.n > 0 && o.k > 0) {
        if (o.n <= o.k) throw UsageError("need n > k");
        mdim = o.n - o.k;
    }
    const MatrixSpec s1 = parse_matrix(o.b1, kdim);
    const MatrixSpec s2 = parse_matrix(o.b2, mdim);
    const auto k = s1.matrix.rows();
    const auto m = s2.matrix.rows();
    const auto us = parse_double_list(o.u);
    rep.config.insert({{"k", std::to_string(k)},
                       {"n", std::to_string(k + m)},
                       {"b1", o.b1},
                       {"b2", o.b2},
                       {"u", o.u},
                       {"nsamples", std::to_string(o.nsamples)}});

    const auto j = j_exact(s1.matrix, s2.matrix);
    std::optional<CharPolyJExact> jq;
    if (s1.exact_diag && s2.exact_diag) {
        std::vector<Rational> a, b;
        for (const auto& x : *s1.exact_diag) a.push_back(x * x);
        for (const auto& x : *s2.exact_diag) b.push_back(x * x);
        if (std::any_of(a.begin(), a.end(), [](const Rational& x) { return x == 0; }))
            throw DegenerateMatrix("B1 is singular");
        jq = j_exact_rational(a, b);
    }
    bool nonneg = true, support = true;
    for (std::size_t i = 0; i < j.coeffs.size(); ++i) {
        auto& r = rep.add("c" + std::to_string(i), j.coeffs[i]);
        if (jq) r.exact = jq->coeffs[i].str();
        nonneg &= j.coeffs[i] >= 0.0;
        support &= i % 4 == 0 || j.coeffs[i] == 0.0;
    }
    rep.add("coefficients_nonnegative", nonneg ? 1.0 : 0.0, std::nullopt, exact_verdict(nonneg));
    rep.add("coefficients_vanish_unless_4_divides_j", support ? 1.0 : 0.0, std::nullopt, exact_verdict(support));
    const auto at_one = j_at_one_check(s1.matrix, s2.matrix);
    rep.add("J(1)>=1", at_one.value, std::nullopt, exact_verdict(at_one.pass));

    const RngStream rng(common.seed);
    std::vector<Estimate> mc;
    if (o.nsamples > 0) mc = j_mc_many(s1.matrix, s2.matrix, us, o.nsamples, rng, common.workers);
    for (std::size_t i = 0; i < us.size(); ++i) {
        const std::string tag = "J(" + detail::num(us[i]) + ")";
        auto& r = rep.add(tag, j(us[i]));
        if (jq) r.exact = (*jq)(*parse_number(detail::num(us[i])).exact).str();
        if (!mc.empty()) {
            rep.add(tag + ".mc", mc[i]);
            rep.add(tag + ".mc_minus_exact", mc[i].value - j(us[i]), mc[i].std_error,
                    agreement_verdict(mc[i].value, j(us[i]), mc[i].std_error));
        }
    }
    return rep;
}

inline Report cmd_lyap(const LyapOptions& o, const CommonOptions& common) {
    Report rep;
    rep.command = "lyap";
    const MeasureModel model = parse_model(o.model, o.n > 0 ? std::optional<Eigen::Index>(o.n) : std::nullopt);
    const auto n = model.n();
    const auto ks = detail::k_list(o.k, n);
    if (o.m < 1) throw UsageError("m must be positive");
    if (o.nsamples < 2) throw UsageError("nsamples must be at least 2");
    rep.config = {{"model", o.model},       {"n", std::to_string(n)},
                  {"m", std::to_string(o.m)}, {"k", o.k},
                  {"nsamples", std::to_string(o.nsamples)}, {"seed", std::to_string(common.seed)},
                  {"workers", std::to_string(common.workers)}};

    const RngStream rng(common.seed);
    RngStream chain = rng.substream(0);
    const auto est = lyapunov_spectrum_qr(model, o.m, chain);
    for (Eigen::Index i = 0; i < n; ++i)
        rep.add("r" + std::to_string(i + 1), est.r[static_cast<std::size_t>(i)], est.std_error[static_cast<std::size_t>(i)]);

    // The QR diagonals telescope to log|det| of every factor.
    const double total = est.partial_sum(static_cast<std::size_t>(n)).value;
    rep.add("sum_r_minus_mean_log_abs_det", total - model.log_abs_det(), std::nullopt,
            exact_verdict(std::abs(total - model.log_abs_det()) <= 1e-8 * std::max(1.0, std::abs(model.log_abs_det()))));

    if (!model.orthogonally_invariant()) {
        const auto& pm = std::get<PointMass>(model.variant());
        const auto logs = eig_log_moduli(pm.a);
        for (Eigen::Index i = 0; i < n; ++i)
            rep.add("log_abs_eigenvalue" + std::to_string(i + 1), logs.values[static_cast<std::size_t>(i)]);
        rep.notes.push_back("point mass: r converges to the eigenvalue log-moduli with an O(1/m) transient");
        return rep;
    }
    for (std::size_t k : ks) {
        const std::string tag = "k" + std::to_string(k);
        const auto qr = est.partial_sum(k);
        const auto g = topk_sum_grassmann(model, k, o.nsamples, rng.substream(k), common.workers);
        rep.add(tag + ".qr_partial_sum", qr);
        rep.add(tag + ".grassmann_sum", g);
        const double sigma = std::hypot(qr.std_error, g.std_error);
        rep.add(tag + ".grassmann_minus_qr", g.value - qr.value, sigma, agreement_verdict(g.value, qr.value, sigma));
    }
    return rep;
}

inline Report cmd_verify_main(const VerifyOptions& o, const CommonOptions& common) {
    Report rep;
    rep.command = "verify-main";
    const MeasureModel model = parse_model(o.model, o.n > 0 ? std::optional<Eigen::Index>(o.n) : std::nullopt);
    if (!model.orthogonally_invariant()) throw UsageError("verify-main needs an orthogonally invariant model");
    const auto n = model.n();
    const auto ks = detail::k_list(o.k, n);
    if (o.nsamples < 2) throw UsageError("nsamples must be at least 2");
    rep.config = {{"model", o.model}, {"n", std::to_string(n)}, {"k", o.k},
                  {"nsamples", std::to_string(o.nsamples)}, {"seed", std::to_string(common.seed)},
                  {"workers", std::to_string(common.workers)}};

    const RngStream rng(common.seed);
    for (std::size_t k : ks) {
        const std::string tag = "k" + std::to_string(k);
        const auto r = verify_main_inequality(model, k, o.nsamples, rng.substream(k), common.workers);
        rep.add(tag + ".lhs_eigen", r.eigen_lhs);
        rep.add(tag + ".lhs_sup_invariant", r.sup_lhs.estimate);
        rep.add(tag + ".grassmann_positive_mean", r.grassmann_mean);
        rep.add(tag + ".rhs", r.rhs, r.rhs_std_error);
        const double sigma = r.margin_std_error();
        rep.add(tag + ".margin", r.margin(), sigma, margin_verdict(r.margin(), sigma));
        rep.add(tag + ".margin_sigmas", sigma > 0 ? r.margin() / sigma : 0.0);
        const double eig_sigma = std::hypot(r.eigen_lhs.std_error, r.rhs_std_error);
        const double eig_margin = r.eigen_lhs.value - r.rhs;
        rep.add(tag + ".eigen_margin", eig_margin, eig_sigma, margin_verdict(eig_margin, eig_sigma));
        rep.add(tag + ".pointwise_violations", static_cast<double>(r.sup_lhs.pointwise_violations), std::nullopt,
                exact_verdict(r.sup_lhs.pointwise_violations == 0));
        rep.add(tag + ".rejection_rate", r.sup_lhs.rejection_rate(), std::nullopt,
                r.sup_lhs.flagged() ? Verdict::Inconclusive : Verdict::Pass);
        rep.counts[tag + ".accepted"] = r.sup_lhs.accepted;
        rep.counts[tag + ".rejected"] = r.sup_lhs.rejected;
        rep.counts[tag + ".pointwise_violations"] = r.sup_lhs.pointwise_violations;
    }

    if (std::abs(model.log_abs_det()) <= 1e-12) {
        // |det| = 1: every top-k eigenvalue log-modulus sum is nonnegative.
        RngStream draws = rng.substream(1000);
        double worst = std::numeric_limits<double>::infinity();
        std::uint64_t negative = 0;
        for (std::size_t t = 0; t < o.nsamples; ++t) {
            const auto logs = eig_log_moduli(sample(model, draws));
            for (Eigen::Index k = 1; k <= n; ++k) {
                const double s = logs.top_sum(static_cast<std::size_t>(k));
                worst = std::min(worst, s);
                negative += s < -1e-10;
            }
        }
        rep.add("unimodular.min_top_sum", worst, std::nullopt, exact_verdict(negative == 0));
        rep.counts["unimodular.negative_top_sums"] = negative;
    }
    return rep;
}

inline Report cmd_repro_paper(const ReproOptions& o, const CommonOptions& common) {
    Report rep;
    rep.command = "repro-paper";
    if (o.mc_confirm && o.nsamples < 2) throw UsageError("nsamples must be at least 2");
    rep.config = {{"mc-confirm", o.mc_confirm ? "true" : "false"}, {"nsamples", std::to_string(o.nsamples)},
                  {"seed", std::to_string(common.seed)}, {"workers", std::to_string(common.workers)}};

    detail::add_paper_example(rep, "4-2");
    detail::add_paper_example(rep, "6-2");

    // The two low-rank examples above via the partitions that survive.
    rep.add("6-2.partitions_j2_j6", static_cast<double>(contributing_partitions(2, 2, 4).size() +
                                                         contributing_partitions(6, 2, 4).size()),
            std::nullopt,
            exact_verdict(contributing_partitions(2, 2, 4).empty() && contributing_partitions(6, 2, 4).empty()));
    const auto p44 = contributing_partitions(8, 2, 4);
    rep.add("6-2.partitions_j8", static_cast<double>(p44.size()), std::nullopt,
            exact_verdict(p44.size() == 1 && p44.front() == Partition{4, 4}));

    const SymPolyM zonal = jack_in_monomials(Partition{2}, kZonalAlpha, 2);
    auto& z = rep.add("zonal_P[2](1,1)", convert_rational<double>(eval_at_ones(zonal)), std::nullopt,
                      exact_verdict(zonal.str() == "m[2] + 2/3 m[1,1]" && eval_at_ones(zonal) == Rational(8, 3)));
    z.exact = zonal.str();

    RngStream chain(7);
    const auto pm = lyapunov_spectrum_qr(MeasureModel::point_mass(detail::diag_matrix({2.0, 1.0, 0.5})), 10000, chain);
    const double want[] = {std::log(2.0), 0.0, -std::log(2.0)};
    double err = 0.0;
    for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(pm.r[static_cast<std::size_t>(i)] - want[i]));
    rep.add("point_mass_diag(2,1,1/2).max_error", err, std::nullopt, exact_verdict(err <= 1e-6));

    if (o.mc_confirm) {
        const RngStream rng(common.seed);
        RngStream inst(4244);
        const Matrix a2 = random_with_singular_values(log_uniform(2, 0.5, 2.0, inst), inst);
        const Matrix b2 = random_with_singular_values(log_uniform(2, 0.5, 2.0, inst), inst);
        const Matrix b4 = random_with_singular_values(log_uniform(4, 0.5, 2.0, inst), inst);
        const struct {
            const char* name;
            const Matrix& b1;
            const Matrix& b2;
        } cases[] = {{"4-2", a2, b2}, {"6-2", a2, b4}};
        std::uint64_t stream = 1;
        for (const auto& c : cases) {
            const auto exact = j_exact(c.b1, c.b2);
            const auto mc = j_mc(c.b1, c.b2, 1.0, o.nsamples, rng.substream(stream++), common.workers);
            const std::string tag = std::string(c.name) + ".J(1)";
            rep.add(tag + ".exact", exact(1.0));
            rep.add(tag + ".mc", mc);
            rep.add(tag + ".mc_minus_exact", mc.value - exact(1.0), mc.std_error,
                    agreement_verdict(mc.value, exact(1.0), mc.std_error));
        }
    }
    return rep;
}

}  // namespace lyapinv::cli
