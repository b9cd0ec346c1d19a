#pragma once

// Command-line front end: `verify`, `det` and `classno` subcommands.
// Exit codes: 0 success, 1 usage or I/O error, 2 some check failed.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cyclodet/classno.hpp"
#include "cyclodet/detkit.hpp"
#include "cyclodet/matrix.hpp"
#include "cyclodet/report.hpp"
#include "cyclodet/subfield.hpp"
#include "cyclodet/verify.hpp"

namespace cyclodet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

struct RunConfig {
    std::int64_t pmin = 5;
    std::int64_t pmax = 5;
    std::optional<std::int64_t> delta;
    std::optional<std::size_t> delta_sweep;
    std::string backend = "modular";
    std::int64_t crosscheck_max_p = 60;
    unsigned threads = 0;
    std::string out = "-";
    std::string format = "json";
    std::optional<std::string> cache_dir;
};

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.pmin <= 3 || cfg.pmin > cfg.pmax) {
        err << "error: need 3 < pmin <= pmax\n";
        return kExitUsage;
    }
    if (cfg.delta && cfg.delta_sweep) {
        err << "error: --delta and --delta-sweep are exclusive\n";
        return kExitUsage;
    }
    RunOptions opts;
    if (cfg.delta) opts.delta = {DeltaMode::Kind::Explicit, *cfg.delta, 1};
    if (cfg.delta_sweep) opts.delta = {DeltaMode::Kind::Sweep, 0, *cfg.delta_sweep};
    opts.backend = cfg.backend == "bareiss" ? BackendChoice::Bareiss
                   : cfg.backend == "both"  ? BackendChoice::Both
                                            : BackendChoice::Modular;
    opts.crosscheck_max_p = cfg.crosscheck_max_p;
    opts.threads = cfg.threads;

    std::optional<ReportCache> cache;
    try {
        if (cfg.cache_dir && !cfg.cache_dir->empty()) {
            cache.emplace(*cfg.cache_dir, opts);
            cache->attach(opts);
        }
    } catch (const std::exception& e) {
        err << "error: cache: " << e.what() << '\n';
        return kExitUsage;
    }

    const auto reports = run_range(cfg.pmin, cfg.pmax, opts);
    const std::string body = cfg.format == "csv" ? to_csv(reports) : to_json(reports).dump(2) + "\n";
    if (cfg.out == "-") {
        out << body;
    } else {
        std::ofstream f(cfg.out);
        if (!f || !(f << body)) {
            err << "error: cannot write " << cfg.out << '\n';
            return kExitUsage;
        }
    }

    std::size_t failed = 0;
    for (const auto& r : reports) {
        if (r.all_passed()) continue;
        ++failed;
        err << "p = " << r.p << ": failed";
        for (const auto& n : r.failures()) err << ' ' << n;
        err << '\n';
    }
    err << reports.size() << " primes, " << failed << " with failures\n";
    return failed == 0 ? kExitOk : kExitCheckFailed;
}

inline std::string decomposition_line(const CycElt& d) {
    const auto p = d.p();
    try {
        const auto q = quad_decompose(d);
        return "u + v*g: u = " + q.x().get_str() + ", v = " + q.y().get_str() + "  (g^2 = " +
               std::to_string(gauss_square(p)) + ")";
    } catch (const std::invalid_argument&) {
    }
    if (p % 4 != 1) return {};
    try {
        const auto q = quartic_decompose(d, p);
        return "(alpha + beta*sqrt(p))*delta: alpha = " + q.alpha.get_str() + ", beta = " + q.beta.get_str() +
               ", delta^2 = " + q.delta_square().to_string() + "  (g = sqrt(p))";
    } catch (const std::exception&) {
        return {};
    }
}

inline int cmd_det(const std::string& family_name_arg, std::int64_t p, std::optional<std::int64_t> delta,
                   const std::string& backend_arg, std::ostream& out, std::ostream& err) {
    const auto family = parse_family(family_name_arg);
    if (!family) {
        err << "error: unknown family " << family_name_arg << '\n';
        return kExitUsage;
    }
    if (!is_odd_prime(p)) {
        err << "error: p must be an odd prime\n";
        return kExitUsage;
    }
    const Backend backend = backend_arg == "bareiss" ? Backend::Bareiss : Backend::Modular;
    const std::int64_t dl = delta.value_or(needs_delta(*family) ? least_nonresidue(p) : 0);
    try {
        switch (*family) {
            case Family::S: out << det_int(build_S(p), backend).value << '\n'; return kExitOk;
            case Family::T: out << det_int(build_T(p, dl), backend).value << '\n'; return kExitOk;
            case Family::SDelta: out << det_int(build_S_delta(p, dl), backend).value << '\n'; return kExitOk;
            default: break;
        }
        CycMatrix m;
        switch (*family) {
            case Family::C: m = build_C(p); break;
            case Family::D: m = build_D(p); break;
            case Family::DDelta: m = build_D_delta(p, dl); break;
            case Family::DTilde: m = build_D_tilde(p); break;
            case Family::E: m = build_E(p); break;
            case Family::F: m = build_F(p, dl); break;
            default: break;
        }
        const auto d = det_cyc(m, backend).value;
        out << d.to_string() << '\n';
        out << "coefficients:";
        for (const auto& c : d.coeff_strings()) out << ' ' << c;
        out << '\n';
        if (const auto line = decomposition_line(d); !line.empty()) out << line << '\n';
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

inline int cmd_classno(std::int64_t p, std::ostream& out, std::ostream& err) {
    if (p <= 3 || !is_prime(p)) {
        err << "error: p must be a prime > 3\n";
        return kExitUsage;
    }
    try {
        const auto c = class_data(p);
        if (c.h_neg) {
            out << "h(-" << p << ") = " << *c.h_neg << '\n';
        } else {
            const auto& e = *c.eps;
            out << "h(" << p << ") = " << *c.h_pos << '\n';
            out << "eps = (" << e.t << " + " << (e.u == 1 ? std::string() : e.u.get_str() + "*") << "sqrt(" << p
                << "))/2, norm " << e.norm << '\n';
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Exact determinants of cyclotomic and Legendre-symbol matrices"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("CYCLODET_CACHE_DIR")) cfg.cache_dir = env;
    auto* verify = app.add_subcommand("verify", "Run every check for each prime in [pmin, pmax]");
    verify->add_option("--pmin", cfg.pmin, "Smallest p")->required();
    verify->add_option("--pmax", cfg.pmax, "Largest p")->required();
    verify->add_option("--delta", cfg.delta, "Use this non-residue Delta");
    verify->add_option("--delta-sweep", cfg.delta_sweep, "Use the k least non-residues")->check(CLI::PositiveNumber);
    verify->add_option("--backend", cfg.backend, "Primary determinant backend")
        ->check(CLI::IsMember({"modular", "bareiss", "both"}))
        ->capture_default_str();
    verify->add_option("--crosscheck-max-p", cfg.crosscheck_max_p,
                       "Recompute cyclotomic determinants with the other backend up to this p")
        ->capture_default_str();
    verify->add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str();
    verify->add_option("--out", cfg.out, "Output file, - for stdout")->capture_default_str();
    verify->add_option("--format", cfg.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    verify->add_option("--cache-dir", cfg.cache_dir, "Report cache directory (default $CYCLODET_CACHE_DIR)");

    std::string family;
    std::int64_t p = 0;
    std::optional<std::int64_t> delta;
    std::string det_backend = "modular";
    auto* det = app.add_subcommand("det", "Print one determinant");
    det->add_option("--family", family, "C, D, DD, Dtilde, E, F, S, T or SD")->required();
    det->add_option("--p", p, "Odd prime")->required();
    det->add_option("--delta", delta, "Non-residue for DD, F, T, SD (default: least)");
    det->add_option("--backend", det_backend, "bareiss or modular")
        ->check(CLI::IsMember({"modular", "bareiss"}))
        ->capture_default_str();

    std::int64_t cp = 0;
    auto* classno = app.add_subcommand("classno", "Class number data of the quadratic subfield");
    classno->add_option("--p", cp, "Prime > 3")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    if (*verify) return cmd_verify(cfg, out, err);
    if (*det) return cmd_det(family, p, delta, det_backend, out, err);
    return cmd_classno(cp, out, err);
}

}  // namespace cyclodet::cli
