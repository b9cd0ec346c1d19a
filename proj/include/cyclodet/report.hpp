#pragma once

// JSON and CSV forms of PrimeReport, and an on-disk cache of reports.
// Integers and rationals are written as decimal strings.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cyclodet/verify.hpp"

namespace cyclodet {

using Json = nlohmann::ordered_json;

/// Bumped whenever report contents change for the same inputs.
inline constexpr std::string_view kReportVersion = "cyclodet 1.0.0 / report 1";

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string version_hash() {
    std::ostringstream os;
    os << std::hex << fnv1a64(kReportVersion);
    return os.str();
}

namespace detail {

template <class T>
Json opt_str(const std::optional<T>& x) {
    return x ? Json(x->get_str()) : Json(nullptr);
}

template <class T>
Json opt_num(const std::optional<T>& x) {
    return x ? Json(*x) : Json(nullptr);
}

inline std::optional<BigInt> big_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return BigInt(j.get<std::string>());
}

inline std::optional<Rational> rat_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    Rational r(j.get<std::string>());
    r.canonicalize();
    return r;
}

template <class T>
std::optional<T> num_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

inline Json cyc_json(const std::optional<CycElt>& x) {
    if (!x) return nullptr;
    return x->coeff_strings();
}

inline std::optional<CycElt> cyc_from(const Json& j, std::int64_t p) {
    if (j.is_null()) return std::nullopt;
    std::vector<Rational> c;
    for (const auto& s : j) {
        Rational r(s.get<std::string>());
        r.canonicalize();
        c.push_back(r);
    }
    return CycElt::from_coeffs(p, std::move(c));
}

inline Status status_from(std::string_view s) {
    if (s == "pass") return Status::Pass;
    if (s == "skipped") return Status::Skipped;
    return Status::Fail;
}

}  // namespace detail

inline Json to_json(const PrimeReport& r) {
    using detail::opt_num;
    using detail::opt_str;
    Json j;
    j["p"] = r.p;
    j["residue_mod8"] = r.residue_mod8;

    Json cls;
    cls["h_neg"] = opt_num(r.class_data.h_neg);
    cls["h_pos"] = opt_num(r.class_data.h_pos);
    if (r.class_data.eps) {
        cls["eps"] = {{"t", r.class_data.eps->t.get_str()},
                      {"u", r.class_data.eps->u.get_str()},
                      {"norm", r.class_data.eps->norm}};
    } else {
        cls["eps"] = nullptr;
    }
    j["class"] = cls;

    Json deltas = Json::array();
    for (const auto& d : r.deltas) {
        deltas.push_back({{"delta", d.delta}, {"valid", d.valid}, {"T", opt_str(d.det_T)}, {"SD", opt_str(d.det_SD)}});
    }
    j["deltas"] = deltas;

    Json dets;
    dets["S"] = opt_str(r.det_S);
    dets["T"] = r.deltas.empty() ? Json(nullptr) : opt_str(r.deltas.front().det_T);
    dets["SD"] = r.deltas.empty() ? Json(nullptr) : opt_str(r.deltas.front().det_SD);
    dets["C"] = detail::cyc_json(r.det_C);
    dets["D"] = detail::cyc_json(r.det_D);
    j["dets"] = dets;

    if (r.p % 4 == 3) {
        j["decomp"] = {{"a_p", opt_str(r.a_p)}, {"b_p", opt_str(r.b_p)}, {"u_p", opt_str(r.u_p)}, {"v_p", opt_str(r.v_p)}};
        j["nu"] = {{"a", opt_num(r.nu_a)}, {"b", opt_num(r.nu_b)}};
    } else {
        j["decomp"] = {{"alpha", opt_str(r.alpha)},
                       {"beta", opt_str(r.beta)},
                       {"delta_sign", opt_num(r.delta_sign)},
                       {"g4_sign", opt_num(r.g4_sign)}};
    }

    Json checks = Json::object();
    for (const auto& [name, c] : r.checks) {
        checks[name] = {{"status", status_name(c.status)},
                        {"pass", c.status != Status::Fail},
                        {"lhs", c.lhs},
                        {"rhs", c.rhs},
                        {"detail", c.detail}};
    }
    j["checks"] = checks;

    Json disc = Json::array();
    for (const auto& d : r.discrepancies) {
        disc.push_back({{"name", d.name}, {"stated", d.stated}, {"observed", d.observed}, {"detail", d.detail}});
    }
    j["discrepancies"] = disc;
    j["timings_ms"] = r.timings_ms;
    return j;
}

inline PrimeReport report_from_json(const Json& j) {
    PrimeReport r;
    r.p = j.at("p").get<std::int64_t>();
    r.residue_mod8 = j.at("residue_mod8").get<int>();

    const auto& cls = j.at("class");
    r.class_data.p = r.p;
    r.class_data.h_neg = detail::num_from<std::int64_t>(cls.at("h_neg"));
    r.class_data.h_pos = detail::num_from<std::int64_t>(cls.at("h_pos"));
    if (!cls.at("eps").is_null()) {
        const auto& e = cls.at("eps");
        r.class_data.eps = FundamentalUnit{BigInt(e.at("t").get<std::string>()), BigInt(e.at("u").get<std::string>()),
                                           e.at("norm").get<int>()};
    }

    for (const auto& d : j.at("deltas")) {
        r.deltas.push_back({d.at("delta").get<std::int64_t>(), d.at("valid").get<bool>(), detail::big_from(d.at("T")),
                            detail::big_from(d.at("SD"))});
    }

    const auto& dets = j.at("dets");
    r.det_S = detail::big_from(dets.at("S"));
    r.det_C = detail::cyc_from(dets.at("C"), r.p);
    r.det_D = detail::cyc_from(dets.at("D"), r.p);

    const auto& dec = j.at("decomp");
    if (r.p % 4 == 3) {
        r.a_p = detail::rat_from(dec.at("a_p"));
        r.b_p = detail::rat_from(dec.at("b_p"));
        r.u_p = detail::rat_from(dec.at("u_p"));
        r.v_p = detail::rat_from(dec.at("v_p"));
        r.nu_a = detail::num_from<std::int64_t>(j.at("nu").at("a"));
        r.nu_b = detail::num_from<std::int64_t>(j.at("nu").at("b"));
    } else {
        r.alpha = detail::rat_from(dec.at("alpha"));
        r.beta = detail::rat_from(dec.at("beta"));
        r.delta_sign = detail::num_from<int>(dec.at("delta_sign"));
        r.g4_sign = detail::num_from<int>(dec.at("g4_sign"));
    }

    for (const auto& [name, c] : j.at("checks").items()) {
        r.checks[name] = {detail::status_from(c.at("status").get<std::string>()), c.at("lhs").get<std::string>(),
                          c.at("rhs").get<std::string>(), c.at("detail").get<std::string>()};
    }
    for (const auto& d : j.at("discrepancies")) {
        r.discrepancies.push_back({d.at("name").get<std::string>(), d.at("stated").get<std::string>(),
                                   d.at("observed").get<std::string>(), d.at("detail").get<std::string>()});
    }
    r.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
    return r;
}

inline Json to_json(const std::vector<PrimeReport>& reports) {
    Json a = Json::array();
    for (const auto& r : reports) a.push_back(to_json(r));
    return a;
}

inline std::vector<PrimeReport> reports_from_json(const Json& j) {
    std::vector<PrimeReport> out;
    for (const auto& e : j) out.push_back(report_from_json(e));
    return out;
}

/// One row per prime, one column per check name seen in any report.
inline std::string to_csv(const std::vector<PrimeReport>& reports) {
    std::set<std::string> names;
    for (const auto& r : reports)
        for (const auto& [name, c] : r.checks) names.insert(name);
    std::ostringstream os;
    os << "p,residue_mod8,all_passed";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (const auto& r : reports) {
        os << r.p << ',' << r.residue_mod8 << ',' << (r.all_passed() ? "true" : "false");
        for (const auto& n : names) {
            os << ',';
            if (auto it = r.checks.find(n); it != r.checks.end()) os << status_name(it->second.status);
        }
        os << '\n';
    }
    return os.str();
}

inline std::string delta_mode_key(const DeltaMode& m) {
    switch (m.kind) {
        case DeltaMode::Kind::Least: return "least";
        case DeltaMode::Kind::Explicit: return "explicit:" + std::to_string(m.value);
        case DeltaMode::Kind::Sweep: return "sweep:" + std::to_string(m.count);
    }
    return "?";
}

/// One JSON-lines file per prime. Each line is {"key": ..., "report": ...};
/// a lookup returns the last line whose key matches.
class ReportCache {
public:
    ReportCache(std::filesystem::path dir, const RunOptions& opts) : dir_(std::move(dir)), opts_(opts) {
        std::filesystem::create_directories(dir_);
    }

    [[nodiscard]] Json key(std::int64_t p) const {
        std::string backend = opts_.backend == BackendChoice::Modular   ? "modular"
                              : opts_.backend == BackendChoice::Bareiss ? "bareiss"
                                                                        : "both";
        return {{"p", p},
                {"delta_mode", delta_mode_key(opts_.delta)},
                {"backend", backend},
                {"crosscheck_max_p", opts_.crosscheck_max_p},
                {"version", version_hash()}};
    }

    [[nodiscard]] std::filesystem::path file(std::int64_t p) const {
        return dir_ / ("p" + std::to_string(p) + ".jsonl");
    }

    [[nodiscard]] std::optional<PrimeReport> lookup(std::int64_t p) const {
        std::ifstream in(file(p));
        if (!in) return std::nullopt;
        const auto k = key(p);
        std::optional<PrimeReport> found;
        for (std::string line; std::getline(in, line);) {
            if (line.empty()) continue;
            const auto j = Json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("key") || j["key"] != k) continue;
            try {
                found = report_from_json(j.at("report"));
            } catch (const std::exception&) {
                continue;
            }
        }
        return found;
    }

    void store(const PrimeReport& r) const {
        std::ofstream out(file(r.p), std::ios::app);
        if (!out) throw std::runtime_error("cannot write cache file " + file(r.p).string());
        out << Json{{"key", key(r.p)}, {"report", to_json(r)}}.dump() << '\n';
    }

    /// Installs lookup/store hooks on `opts`.
    void attach(RunOptions& opts) const {
        opts.lookup = [this](std::int64_t p) { return lookup(p); };
        opts.store = [this](const PrimeReport& r) { store(r); };
    }

private:
    std::filesystem::path dir_;
    RunOptions opts_;
};

}  // namespace cyclodet
