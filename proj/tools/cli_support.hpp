#pragma once

// Plumbing for lyapinv-cli: matrix/model/partition specs, key=value config
// files, and the versioned report with JSON and CSV output.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <lyapinv/lyapinv.hpp>

namespace lyapinv::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Bad flags, bad specs, malformed files. Maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// A scalar from the command line. Integers, fractions like "-2/3" and plain
/// decimals like "0.25" keep an exact rational alongside the double.
struct Number {
    double value = 0.0;
    std::optional<Rational> exact;
};

/// Decimal big integer; a leading zero would otherwise select octal.
inline Integer decimal_integer(std::string s) {
    s = trim(s);
    std::string sign;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        if (s.front() == '-') sign = "-";
        s.erase(0, 1);
    }
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw UsageError("not an integer: '" + s + "'");
    s.erase(0, std::min(s.find_first_not_of('0'), s.size() - 1));
    return Integer(sign + s);
}

inline Number parse_number(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw UsageError("empty number");
    const auto bad = [&] { return UsageError("not a number: '" + s + "'"); };

    if (const auto slash = s.find('/'); slash != std::string::npos) {
        try {
            const Integer num = decimal_integer(s.substr(0, slash));
            const Integer den = decimal_integer(s.substr(slash + 1));
            if (den == 0) throw UsageError("zero denominator in '" + s + "'");
            const Rational r(num, den);
            return {convert_rational<double>(r), r};
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw bad();
        }
    }

    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw bad();

    // Exact decimal: optional sign, digits, optional fraction, no exponent.
    const bool plain = s.find_first_of("eEnN") == std::string::npos;
    if (!plain) return {v, std::nullopt};
    std::string_view body = s;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    std::string digits;
    int decimals = 0;
    bool after_point = false;
    for (char c : body) {
        if (c == '.') {
            after_point = true;
        } else {
            digits.push_back(c);
            if (after_point) ++decimals;
        }
    }
    Integer den = 1;
    for (int i = 0; i < decimals; ++i) den *= 10;
    const Integer num = decimal_integer(digits);
    return {v, Rational(negative ? Integer(-num) : num, den)};
}

inline std::vector<Number> parse_number_list(const std::string& s) {
    std::vector<Number> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_number(part));
    return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& n : parse_number_list(s)) out.push_back(n.value);
    return out;
}

inline std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw UsageError("not an unsigned integer: '" + t + "'");
    return v;
}

inline Partition parse_partition(const std::string& s) {
    std::string body = trim(s);
    if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
    std::vector<int> parts;
    if (trim(body).empty()) return Partition{};
    for (const auto& p : split(body, ',')) {
        const auto v = parse_u64(p);
        if (v > 1000) throw UsageError("partition part too large: " + p);
        parts.push_back(static_cast<int>(v));
    }
    try {
        return Partition(parts);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

/// A parsed matrix spec. `exact_diag` is set for diagonal specs whose entries
/// are all exact rationals.
struct MatrixSpec {
    Matrix matrix;
    std::optional<std::vector<Rational>> exact_diag;
    std::vector<double> singular_values;  ///< for randsv specs; empty otherwise
};

/// "diag:a1,a2,..." | "randsv:min,max,seed" (needs dim) | "a,b;c,d" rows.
inline MatrixSpec parse_matrix(const std::string& text, std::optional<Eigen::Index> dim = std::nullopt) {
    const std::string s = trim(text);
    MatrixSpec out;
    if (s.rfind("diag:", 0) == 0) {
        const auto entries = parse_number_list(s.substr(5));
        const auto n = static_cast<Eigen::Index>(entries.size());
        out.matrix = Matrix::Zero(n, n);
        std::vector<Rational> exact;
        for (Eigen::Index i = 0; i < n; ++i) {
            out.matrix(i, i) = entries[i].value;
            if (entries[i].exact) exact.push_back(*entries[i].exact);
        }
        if (exact.size() == entries.size()) out.exact_diag = std::move(exact);
    } else if (s.rfind("randsv:", 0) == 0) {
        const auto args = split(s.substr(7), ',');
        if (args.size() != 3) throw UsageError("randsv spec needs min,max,seed: '" + s + "'");
        if (!dim || *dim < 1) throw UsageError("randsv spec needs a known dimension: '" + s + "'");
        const double lo = parse_number(args[0]).value;
        const double hi = parse_number(args[1]).value;
        if (!(lo > 0.0 && hi >= lo)) throw UsageError("randsv needs 0 < min <= max");
        RngStream rng(parse_u64(args[2]));
        const Vector sv = log_uniform(*dim, lo, hi, rng);
        out.singular_values.assign(sv.data(), sv.data() + sv.size());
        out.matrix = random_with_singular_values(sv, rng);
    } else {
        const auto rows = split(s, ';');
        std::vector<std::vector<double>> vals;
        for (const auto& r : rows) vals.push_back(parse_double_list(r));
        const auto n = vals.size();
        for (const auto& r : vals)
            if (r.size() != vals.front().size()) throw UsageError("ragged matrix spec: '" + s + "'");
        out.matrix = Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(vals.front().size()));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < vals[i].size(); ++j)
                out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vals[i][j];
    }
    if (out.matrix.rows() != out.matrix.cols()) throw UsageError("matrix spec is not square: '" + s + "'");
    if (dim && *dim > 0 && out.matrix.rows() != *dim)
        throw UsageError("matrix spec has dimension " + std::to_string(out.matrix.rows()) + ", expected " +
                         std::to_string(*dim));
    return out;
}

/// "point:<matrix>" | "left:<matrix>" | "twosided:d1,d2,..." | "twosided:randsv:min,max,seed".
inline MeasureModel parse_model(const std::string& text, std::optional<Eigen::Index> dim = std::nullopt) {
    const std::string s = trim(text);
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("model spec needs a kind prefix: '" + s + "'");
    const std::string kind = s.substr(0, colon);
    const std::string rest = s.substr(colon + 1);
    try {
        if (kind == "point") return MeasureModel::point_mass(parse_matrix(rest, dim).matrix);
        if (kind == "left") return MeasureModel::left_haar_orbit(parse_matrix(rest, dim).matrix);
        if (kind == "twosided") {
            std::vector<double> d;
            if (rest.rfind("randsv:", 0) == 0) d = parse_matrix(rest, dim).singular_values;
            else if (rest.rfind("diag:", 0) == 0) d = parse_double_list(rest.substr(5));
            else d = parse_double_list(rest);
            if (dim && *dim > 0 && static_cast<Eigen::Index>(d.size()) != *dim)
                throw UsageError("twosided model has the wrong dimension");
            return MeasureModel::two_sided_haar_orbit(Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size())));
        }
    } catch (const DegenerateMatrix& e) {
        throw UsageError(std::string("model: ") + e.what());
    }
    throw UsageError("unknown model kind '" + kind + "' (expected point, left or twosided)");
}

/// key=value lines; '#' starts a comment. Keys are option names without dashes.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

/// Arguments synthesised from a config file for every key the command line
/// does not already set. Booleans take "true"/"false".
inline std::vector<std::string> config_arguments(const std::map<std::string, std::string>& cfg,
                                                 const std::vector<std::string>& given) {
    auto on_command_line = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (const auto& g : given)
            if (g == flag || g.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    std::vector<std::string> out;
    for (const auto& [key, value] : cfg) {
        if (key == "config" || on_command_line(key)) continue;
        if (value == "true") {
            out.push_back("--" + key);
        } else if (value != "false") {
            out.push_back("--" + key + "=" + value);
        }
    }
    return out;
}

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "fail";
}

inline Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::Pass;
    if (s == "fail") return Verdict::Fail;
    if (s == "inconclusive") return Verdict::Inconclusive;
    throw UsageError("unknown verdict '" + s + "'");
}

/// One-sided check of margin >= 0 with Monte Carlo error sigma.
inline Verdict margin_verdict(double margin, double sigma) {
    if (margin >= 3.0 * sigma) return Verdict::Pass;
    if (margin <= -3.0 * sigma) return Verdict::Fail;
    return Verdict::Inconclusive;
}

/// Two estimates of the same quantity.
inline Verdict agreement_verdict(double a, double b, double sigma) {
    return std::abs(a - b) <= 3.0 * sigma + 1e-12 * std::max(1.0, std::abs(b)) ? Verdict::Pass : Verdict::Fail;
}

inline Verdict exact_verdict(bool ok) { return ok ? Verdict::Pass : Verdict::Fail; }

struct Result {
    std::string name;
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<Verdict> verdict;
    std::optional<std::string> exact;  ///< exact rational or symbolic form

    bool operator==(const Result&) const = default;
};

struct Report {
    std::string command;
    std::map<std::string, std::string> config;
    std::vector<Result> results;
    std::map<std::string, std::uint64_t> counts;
    std::vector<std::string> notes;
    std::optional<double> wall_clock_seconds;
    std::string version = kVersion;
    int schema_version = kSchemaVersion;

    bool operator==(const Report&) const = default;

    Result& add(std::string name, double value, std::optional<double> std_error = std::nullopt,
                std::optional<Verdict> verdict = std::nullopt) {
        results.push_back({std::move(name), value, std_error, verdict, std::nullopt});
        return results.back();
    }
    void add(const std::string& name, const Estimate& e, std::optional<Verdict> verdict = std::nullopt) {
        add(name, e.value, e.std_error, verdict);
    }

    /// Worst verdict present; pass when nothing was checked.
    Verdict overall() const {
        Verdict v = Verdict::Pass;
        for (const auto& r : results) {
            if (!r.verdict) continue;
            if (*r.verdict == Verdict::Fail) return Verdict::Fail;
            if (*r.verdict == Verdict::Inconclusive) v = Verdict::Inconclusive;
        }
        return v;
    }
};

inline json to_json(const Report& r) {
    json results = json::array();
    for (const auto& x : r.results) {
        json j{{"name", x.name}, {"value", x.value}};
        j["stderr"] = x.std_error ? json(*x.std_error) : json(nullptr);
        j["verdict"] = x.verdict ? json(to_string(*x.verdict)) : json(nullptr);
        if (x.exact) j["exact"] = *x.exact;
        results.push_back(std::move(j));
    }
    json out{{"schema_version", r.schema_version},
             {"version", r.version},
             {"command", r.command},
             {"config", r.config},
             {"results", results},
             {"counts", r.counts},
             {"notes", r.notes},
             {"overall", to_string(r.overall())}};
    if (r.wall_clock_seconds) out["wall_clock_seconds"] = *r.wall_clock_seconds;
    return out;
}

inline Report report_from_json(const json& j) {
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion) throw UsageError("unsupported report schema version");
    r.version = j.at("version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.counts = j.at("counts").get<std::map<std::string, std::uint64_t>>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    for (const auto& x : j.at("results")) {
        Result res;
        res.name = x.at("name").get<std::string>();
        res.value = x.at("value").get<double>();
        if (!x.at("stderr").is_null()) res.std_error = x.at("stderr").get<double>();
        if (!x.at("verdict").is_null()) res.verdict = verdict_from_string(x.at("verdict").get<std::string>());
        if (x.contains("exact")) res.exact = x.at("exact").get<std::string>();
        r.results.push_back(std::move(res));
    }
    if (j.contains("wall_clock_seconds")) r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    return r;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

inline std::string format_double(double v) {
    // Shortest round-trip representation, same as the JSON writer.
    return json(v).dump();
}

/// name,value,stderr,verdict; one row per scalar result. Exact or symbolic
/// forms replace the floating value when present.
inline std::string to_csv(const Report& r) {
    std::string out = "name,value,stderr,verdict\n";
    for (const auto& x : r.results) {
        out += csv_field(x.name) + "," + (x.exact ? csv_field(*x.exact) : format_double(x.value)) + "," +
               (x.std_error ? format_double(*x.std_error) : "") + "," + (x.verdict ? to_string(*x.verdict) : "") + "\n";
    }
    return out;
}

}  // namespace lyapinv::cli
