#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcorr/errors.hpp"
#include "qcorr/ising.hpp"
#include "qcorr/measure.hpp"
#include "qcorr/oracles.hpp"
#include "qcorr/parallel.hpp"
#include "qcorr/state_io.hpp"
#include "qcorr/states.hpp"

namespace qcorr::cli {

inline constexpr const char* kSchemaVersion = "qcorr-report/1";

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kParseError = 2,
    kValidationError = 3,
    kPermutationLimit = 4,
};

// All numeric output goes through one formatter: 12 significant digits,
// '.' decimal separator regardless of locale.
inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Output lands at its final path in one step: temp file next to the target,
// then rename. Empty path or "-" streams to stdout.
inline void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw error("cannot write '" + tmp + "'");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::vector<double> parse_grid(const std::string& text) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &extra) != 3 || step <= 0.0)
        throw parse_error("grid: expected lo:hi:step with step > 0, got '" + text + "'");
    if (hi < lo) throw parse_error("grid: hi < lo in '" + text + "'");
    const long n = std::lround((hi - lo) / step) + 1;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (v > hi + 1e-9 * step) break;
        grid.push_back(v);
    }
    return grid;
}

inline Variant parse_variant_single(const std::string& name) {
    if (name == "plain") return Variant::plain;
    if (name == "mu") return Variant::mu;
    throw parse_error("variant: expected plain or mu, got '" + name + "'");
}

inline std::vector<Variant> parse_variants(const std::string& name) {
    if (name == "both") return {Variant::plain, Variant::mu};
    return {parse_variant_single(name)};
}

// ---------------------------------------------------------------------------
// measure

namespace detail {

inline nlohmann::json report_to_json(const MeasureReport& rep) {
    nlohmann::json j;
    j["variant"] = variant_name(rep.variant);
    j["permutation"] = rep.permutation;
    j["total_plain"] = rep.total_plain;
    j["total_mu"] = rep.total_mu;
    j["degenerate"] = rep.any_degenerate();
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& st : rep.steps) {
        nlohmann::json s;
        s["subsystem"] = st.subsystem;
        s["q_plain"] = st.q_plain;
        s["q_mu"] = st.q_mu;
        s["complement_purity"] = st.complement_purity;
        s["degenerate"] = st.degenerate;
        s["tie_spread"] = st.tie_spread;
        nlohmann::json proj = nlohmann::json::array();
        for (long r = 0; r < st.projector.matrix.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (long c = 0; c < st.projector.matrix.cols(); ++c)
                row.push_back(st.projector.matrix(r, c));
            proj.push_back(std::move(row));
        }
        s["projector"] = std::move(proj);
        steps.push_back(std::move(s));
    }
    j["steps"] = std::move(steps);
    return j;
}

inline void report_to_text(std::ostream& os, const MeasureReport& rep) {
    os << "variant: " << variant_name(rep.variant) << "\n";
    os << "permutation:";
    for (int s : rep.permutation) os << " " << s;
    os << "\n";
    os << "total_plain: " << fmt(rep.total_plain) << "\n";
    os << "total_mu: " << fmt(rep.total_mu) << "\n";
    os << "degenerate: " << (rep.any_degenerate() ? "yes" : "no") << "\n";
    os << "steps:\n";
    for (const auto& st : rep.steps) {
        os << "  - subsystem: " << st.subsystem << "\n";
        os << "    q_plain: " << fmt(st.q_plain) << "\n";
        os << "    q_mu: " << fmt(st.q_mu) << "\n";
        os << "    complement_purity: " << fmt(st.complement_purity) << "\n";
        os << "    degenerate: " << (st.degenerate ? "yes" : "no") << "\n";
        os << "    tie_spread: " << fmt(st.tie_spread) << "\n";
        os << "    projector:\n";
        for (long r = 0; r < st.projector.matrix.rows(); ++r) {
            os << "      ";
            for (long c = 0; c < st.projector.matrix.cols(); ++c) {
                if (c) os << " ";
                os << fmt(st.projector.matrix(r, c));
            }
            os << "\n";
        }
    }
}

} // namespace detail

struct MeasureConfig {
    std::string input;        // state file path
    std::string spec;         // state family spec
    std::string variant = "plain";
    std::string permutation = "max";
    std::string out;
    bool json = false;
};

inline int cmd_measure(const MeasureConfig& cfg) {
    DensityMatrix rho = cfg.input.empty() ? build(parse_state_spec(cfg.spec)) : load_state(cfg.input);
    validate(rho);
    const std::vector<Variant> variants = parse_variants(cfg.variant);

    std::vector<int> explicit_perm;
    const bool use_max = cfg.permutation == "max";
    if (!use_max) {
        std::stringstream ss(cfg.permutation);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                explicit_perm.push_back(std::stoi(item));
            } catch (const std::exception&) {
                throw parse_error("permutation: expected 'max' or a comma list, got '" +
                                  cfg.permutation + "'");
            }
        }
    }

    std::vector<MeasureReport> reports;
    for (const Variant v : variants)
        reports.push_back(use_max ? total_correlation_max(rho, v)
                                  : total_correlation_sequence(rho, explicit_perm, v));

    std::string content;
    if (cfg.json) {
        nlohmann::json j;
        j["schema"] = kSchemaVersion;
        j["command"] = "measure";
        j["dims"] = rho.dims;
        j["permutation_mode"] = use_max ? "max" : "explicit";
        nlohmann::json rs = nlohmann::json::array();
        for (const auto& rep : reports) rs.push_back(detail::report_to_json(rep));
        j["reports"] = std::move(rs);
        content = j.dump(1) + "\n";
    } else {
        std::ostringstream os;
        os << "schema: " << kSchemaVersion << "\n";
        os << "command: measure\n";
        os << "dims:";
        for (int d : rho.dims) os << " " << d;
        os << "\n";
        os << "permutation_mode: " << (use_max ? "max" : "explicit") << "\n";
        for (const auto& rep : reports) {
            os << "---\n";
            detail::report_to_text(os, rep);
        }
        content = os.str();
    }
    write_output(cfg.out, content);
    return kOk;
}

// ---------------------------------------------------------------------------
// scan-ising

struct ScanConfig {
    int spins = 16;
    std::string grid = "0.2:1.8:0.01";
    double gamma = 1.0;
    double coupling = 1.0;
    std::string variant = "plain";
    std::string out;
};

inline std::string scan_to_csv(const ScanSeries& s, const ScanSeries* s_mu) {
    std::ostringstream os;
    os << (s_mu ? "h,q_total,dq_dh,q_total_mu,dq_dh_mu" : "h,q_total,dq_dh") << "\n";
    const std::size_t n = s.h_grid.size();
    auto deriv = [](const ScanSeries& series, std::size_t i) {
        return (i == 0 || i + 1 == series.h_grid.size())
                   ? std::numeric_limits<double>::quiet_NaN()
                   : series.dq_dh[i - 1];
    };
    for (std::size_t i = 0; i < n; ++i) {
        os << fmt(s.h_grid[i]) << "," << fmt(s.q_values[i]) << "," << fmt(deriv(s, i));
        if (s_mu) os << "," << fmt(s_mu->q_values[i]) << "," << fmt(deriv(*s_mu, i));
        os << "\n";
    }
    const PeakInfo peak = locate_peak(s);
    os << "# peak: h=" << fmt(peak.h) << " |dq_dh|=" << fmt(peak.magnitude) << "\n";
    if (s_mu) {
        const PeakInfo pm = locate_peak(*s_mu);
        os << "# peak_mu: h=" << fmt(pm.h) << " |dq_dh|=" << fmt(pm.magnitude) << "\n";
    }
    return os.str();
}

inline int cmd_scan_ising(const ScanConfig& cfg) {
    const std::vector<double> grid = parse_grid(cfg.grid);
    if (grid.size() < 5) throw parse_error("scan-ising: grid needs at least 5 points");
    ChainParams p;
    p.n_spins = cfg.spins;
    p.gamma = cfg.gamma;
    p.coupling = cfg.coupling;
    p.field = grid.front();
    validate_chain(p);

    const std::vector<Variant> variants = parse_variants(cfg.variant);
    const ScanSeries first = scan(p, grid, variants[0]);
    std::string content;
    if (variants.size() == 2) {
        const ScanSeries second = scan(p, grid, variants[1]);
        content = scan_to_csv(first, &second);
    } else {
        content = scan_to_csv(first, nullptr);
    }
    write_output(cfg.out, content);
    return kOk;
}

// ---------------------------------------------------------------------------
// reproduce

struct ReproduceConfig {
    std::string figure;
    std::string out;
};

namespace detail {

inline std::string reproduce_fig2(bool mu) {
    std::ostringstream os;
    os << (mu ? "x,r2,q_ab_mu,q_ba_mu" : "x,r2,q_ab,q_ba") << "\n";
    const Variant v = mu ? Variant::mu : Variant::plain;
    for (int xi = 0; xi <= 20; ++xi)
        for (int ri = 0; ri <= 20; ++ri) {
            const double x = 0.05 * xi, r2 = 0.05 * ri;
            const double t = (2.0 * x - 1.0) / 3.0;
            const DensityMatrix rho = bd_product_mixture(0.5, {t, t, t}, {0.0, r2, 0.0});
            const double q_ab = total_correlation_sequence(rho, {1, 2}, v).total(v);
            const double q_ba = total_correlation_sequence(rho, {2, 1}, v).total(v);
            os << fmt(x) << "," << fmt(r2) << "," << fmt(q_ab) << "," << fmt(q_ba) << "\n";
        }
    return os.str();
}

inline std::string reproduce_fig3() {
    std::ostringstream os;
    os << "lambda,q_total,q_total_mu,d_s,d_gg\n";
    for (int i = 0; i <= 50; ++i) {
        const double lambda = 0.02 * i;
        const DensityMatrix rho = werner_ghz(lambda);
        const double q = total_correlation_max(rho, Variant::plain).total_plain;
        const double q_mu = total_correlation_max(rho, Variant::mu).total_mu;
        const WernerGhzReference ref = werner_ghz_reference_curves(lambda);
        os << fmt(lambda) << "," << fmt(q) << "," << fmt(q_mu) << "," << fmt(ref.d_s) << ","
           << fmt(ref.d_gg) << "\n";
    }
    return os.str();
}

inline std::string reproduce_fig5() {
    std::ostringstream os;
    os << "lambda,q_total\n";
    std::vector<double> lambdas, totals;
    for (int i = 0; i <= 500; ++i) {
        const double lambda = 0.002 * i;
        const double q = total_correlation_max(w_ghz(lambda), Variant::plain).total_plain;
        lambdas.push_back(lambda);
        totals.push_back(q);
        os << fmt(lambda) << "," << fmt(q) << "\n";
    }
    std::size_t jump_at = 1;
    double jump = 0.0;
    for (std::size_t i = 1; i < totals.size(); ++i) {
        const double d = std::abs(totals[i] - totals[i - 1]);
        if (d > jump) {
            jump = d;
            jump_at = i;
        }
    }
    os << "# discontinuity: lambda=" << fmt(0.5 * (lambdas[jump_at - 1] + lambdas[jump_at]))
       << " jump=" << fmt(jump) << "\n";
    return os.str();
}

inline std::string reproduce_fig6(int spins) {
    const std::vector<double> grid = parse_grid("0.2:1.8:0.01");
    ChainParams p;
    p.n_spins = spins;
    p.field = grid.front();
    return scan_to_csv(scan(p, grid, Variant::plain), nullptr);
}

inline std::string reproduce_werner_table() {
    std::ostringstream os;
    os << "m,x,q_mu\n";
    for (int m = 2; m <= 4; ++m)
        for (int i = 0; i <= 40; ++i) {
            const double x = -1.0 + 0.05 * i;
            const double q = total_correlation_max(werner(m, x), Variant::mu).total_mu;
            os << m << "," << fmt(x) << "," << fmt(q) << "\n";
        }
    return os.str();
}

} // namespace detail

inline int cmd_reproduce(const ReproduceConfig& cfg) {
    std::string content;
    if (cfg.figure == "fig2a")
        content = detail::reproduce_fig2(false);
    else if (cfg.figure == "fig2b")
        content = detail::reproduce_fig2(true);
    else if (cfg.figure == "fig3")
        content = detail::reproduce_fig3();
    else if (cfg.figure == "fig5")
        content = detail::reproduce_fig5();
    else if (cfg.figure == "fig6a")
        content = detail::reproduce_fig6(16);
    else if (cfg.figure == "fig6b")
        content = detail::reproduce_fig6(64);
    else if (cfg.figure == "fig6c")
        content = detail::reproduce_fig6(256);
    else if (cfg.figure == "fig6d")
        content = detail::reproduce_fig6(1024);
    else if (cfg.figure == "werner-table")
        content = detail::reproduce_werner_table();
    else
        throw parse_error("reproduce: unknown figure id '" + cfg.figure +
                          "' (expected fig2a, fig2b, fig3, fig5, fig6a..fig6d, werner-table)");
    write_output(cfg.out, content);
    return kOk;
}

// ---------------------------------------------------------------------------
// oracle-check

struct OracleCheckConfig {
    std::uint64_t seed = 1;
    int qubit_samples = 500;
    int corollary_samples = 100;
    int tripartite_samples = 50;
    std::string out;
};

inline int cmd_oracle_check(const OracleCheckConfig& cfg) {
    const double tol = 1e-6;

    // Qubit measurement oracle vs the eigenvalue formula on random 2x2 states.
    std::vector<double> qubit_dev(cfg.qubit_samples);
    parallel_for(cfg.qubit_samples, [&](int i) {
        const int rank = 1 + static_cast<int>((cfg.seed + i) % 4);
        const DensityMatrix rho = random_mixed({2, 2}, rank, cfg.seed + 1000 + i);
        const CoefficientTensor C = coefficient_tensor(rho);
        const double analytic = subsystem_correlation(C, 1).q_plain;
        const double oracle = geometric_discord_qubit_oracle(rho, 48, 96, 400, cfg.seed + i);
        qubit_dev[i] = std::abs(analytic - oracle);
    });

    // Second sequential step on random 2x3 states (must vanish).
    std::vector<double> second_step(cfg.corollary_samples);
    parallel_for(cfg.corollary_samples, [&](int i) {
        const int rank = 1 + static_cast<int>((cfg.seed + i) % 6);
        const DensityMatrix rho = random_mixed({2, 3}, rank, cfg.seed + 2000 + i);
        second_step[i] = total_correlation_sequence(rho, {1, 2}).steps[1].q_plain;
    });

    // Brute-force projector oracle along the canonical sequence of random
    // three-qubit states.
    std::vector<double> proj_dev(cfg.tripartite_samples), proj_excess(cfg.tripartite_samples);
    parallel_for(cfg.tripartite_samples, [&](int i) {
        const int rank = 1 + static_cast<int>((cfg.seed + i) % 8);
        const DensityMatrix rho = random_mixed({2, 2, 2}, rank, cfg.seed + 3000 + i);
        CoefficientTensor C = coefficient_tensor(rho);
        double dev = 0.0, excess = 0.0;
        for (int s = 1; s <= 3; ++s) {
            const SubsystemCorrelation sub = subsystem_correlation(C, s);
            const double oracle =
                brute_force_projector_min(C, s, Variant::plain, 200, 500, cfg.seed + 10 * i + s);
            dev = std::max(dev, std::abs(sub.q_plain - oracle));
            excess = std::max(excess, sub.q_plain - oracle);
            C = apply_projector(C, s, sub.projector);
        }
        proj_dev[i] = dev;
        proj_excess[i] = excess;
    });

    auto vmax = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        return m;
    };
    const double qubit_max = vmax(qubit_dev);
    const double second_max = vmax(second_step);
    const double proj_max = vmax(proj_dev);
    const double excess_max = vmax(proj_excess);

    const bool pass_qubit = qubit_max <= tol;
    const bool pass_second = second_max <= 1e-10;
    const bool pass_proj = proj_max <= tol && excess_max <= 1e-9;
    const bool pass = pass_qubit && pass_second && pass_proj;

    std::ostringstream os;
    os << "schema: " << kSchemaVersion << "\n";
    os << "command: oracle-check\n";
    os << "seed: " << cfg.seed << "\n";
    os << "qubit_oracle: samples=" << cfg.qubit_samples << " max_abs_dev=" << fmt(qubit_max)
       << " tol=" << fmt(tol) << " " << (pass_qubit ? "pass" : "fail") << "\n";
    os << "corollary: samples=" << cfg.corollary_samples << " max_second_step=" << fmt(second_max)
       << " tol=1e-10 " << (pass_second ? "pass" : "fail") << "\n";
    os << "projector_oracle: samples=" << cfg.tripartite_samples
       << " max_abs_dev=" << fmt(proj_max) << " max_analytic_excess=" << fmt(excess_max)
       << " tol=" << fmt(tol) << " " << (pass_proj ? "pass" : "fail") << "\n";
    os << "result: " << (pass ? "pass" : "fail") << "\n";
    write_output(cfg.out, os.str());
    return pass ? kOk : kFailure;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args) {
    CLI::App app{"qcorr: total quantum correlation of multipartite density matrices"};
    app.require_subcommand(1);

    MeasureConfig mcfg;
    auto* m = app.add_subcommand("measure", "evaluate the total correlation of a state");
    auto* opt_input = m->add_option("--input", mcfg.input, "state file (JSON)");
    auto* opt_spec = m->add_option("--spec", mcfg.spec, "state family, e.g. werner:m=2,x=0.5");
    opt_input->excludes(opt_spec);
    m->add_option("--variant", mcfg.variant, "plain | mu | both");
    m->add_option("--permutation", mcfg.permutation, "max or comma list, e.g. 1,2,3");
    m->add_option("--out", mcfg.out, "output path (default stdout)");
    m->add_flag("--json", mcfg.json, "machine-readable report");

    ScanConfig scfg;
    auto* sc = app.add_subcommand("scan-ising", "field sweep of the transverse-field chain");
    sc->add_option("--spins", scfg.spins, "chain length (even, >= 4)");
    sc->add_option("--grid", scfg.grid, "field grid lo:hi:step");
    sc->add_option("--gamma", scfg.gamma, "anisotropy in [0, 1]");
    sc->add_option("--coupling", scfg.coupling, "coupling J");
    sc->add_option("--variant", scfg.variant, "plain | mu | both");
    sc->add_option("--out", scfg.out, "output path (default stdout)");

    ReproduceConfig rcfg;
    auto* rp = app.add_subcommand("reproduce", "emit the data series behind a figure");
    rp->add_option("--figure", rcfg.figure, "fig2a|fig2b|fig3|fig5|fig6a..fig6d|werner-table")
        ->required();
    rp->add_option("--out", rcfg.out, "output path (default stdout)");

    OracleCheckConfig ocfg;
    auto* oc = app.add_subcommand("oracle-check", "compare the measure against brute-force oracles");
    oc->add_option("--seed", ocfg.seed, "ensemble seed");
    oc->add_option("--qubit-samples", ocfg.qubit_samples, "two-qubit oracle ensemble size");
    oc->add_option("--corollary-samples", ocfg.corollary_samples, "2x3 ensemble size");
    oc->add_option("--tripartite-samples", ocfg.tripartite_samples, "2x2x2 ensemble size");
    oc->add_option("--out", ocfg.out, "output path (default stdout)");

    std::vector<const char*> argv;
    argv.push_back("qcorr");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    }

    try {
        if (m->parsed()) {
            if (mcfg.input.empty() == mcfg.spec.empty())
                throw parse_error("measure: exactly one of --input or --spec is required");
            return cmd_measure(mcfg);
        }
        if (sc->parsed()) return cmd_scan_ising(scfg);
        if (rp->parsed()) return cmd_reproduce(rcfg);
        if (oc->parsed()) return cmd_oracle_check(ocfg);
        return kParseError;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const permutation_limit_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPermutationLimit;
    } catch (const parameter_domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const invalid_dimension_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const invalid_subsystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const no_peak_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}

} // namespace qcorr::cli
