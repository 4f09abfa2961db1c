// tentfarey: command-line driver for transfer-operator truncations of the
// tent-Farey family.
//
//   tentfarey fig1     eigenvalues of A_{r,N} over an r grid
//   tentfarey fig2a    truncated traces for several N against the exact trace
//   tentfarey fig2b    eigenvalues of A_{r,N} next to the sum curves
//   tentfarey validate closed-form entries against the quadrature oracle
//   tentfarey entry    one matrix entry at high precision
//
// Exit status: 0 success, 1 validation failure, 2 bad configuration,
// 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tentfarey/tentfarey.hpp"

namespace tf = tentfarey;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Options {
    std::string r_spec;
    std::string n_spec;
    unsigned precision_bits = 256;
    unsigned eig_precision_bits = 53;
    double tol = 1e-10;
    std::string out;
    bool svg = false;
    bool allow_precision_loss = false;
    int kmax = 10;
    int nmax = 10;
    int quad_order = 128;
    bool no_self_check = false;
    int k = 0;
    int n = 0;
};

const char* kind_name(tf::SweepKind k) {
    switch (k) {
        case tf::SweepKind::figure1: return "fig1";
        case tf::SweepKind::figure2a: return "fig2a";
        case tf::SweepKind::figure2b: return "fig2b";
    }
    return "?";
}

std::filesystem::path meta_path(const std::filesystem::path& out) { return out.string() + ".meta.json"; }

std::filesystem::path svg_path(std::filesystem::path out) { return out.replace_extension(".svg"); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw tf::IoError("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw tf::IoError("write to '" + path.string() + "' failed");
}

json sweep_metadata(const tf::SweepConfig& cfg, const tf::SweepResult& res) {
    json meta;
    meta["sweep"] = kind_name(res.kind);
    meta["precision_bits"] = cfg.precision_bits;
    meta["eig_precision_bits"] = cfg.eig_precision_bits;
    meta["tol"] = cfg.tol;
    meta["N_values"] = cfg.N_values;
    meta["r_count"] = cfg.r_values.size();
    meta["allow_precision_loss"] = cfg.allow_precision_loss;
    json degraded = json::array();
    json failures = json::array();
    for (const auto& row : res.rows) {
        if (row.degraded && (degraded.empty() || degraded.back().get<double>() != row.r)) degraded.push_back(row.r);
        if (!row.ok()) failures.push_back({{"r", row.r}, {"N", row.N}, {"error", row.error}});
    }
    meta["degraded_r"] = degraded;
    meta["degraded_threshold"] = tf::kDegradedAbove;
    meta["failures"] = failures;
    return meta;
}

int finish_sweep(const tf::SweepConfig& cfg, const tf::SweepResult& res) {
    for (const auto& row : res.rows)
        if (!row.ok()) std::cerr << "r = " << row.r << ", N = " << row.N << ": " << row.error << '\n';
    if (cfg.output_path.empty()) {
        tf::emit_csv(res, std::cout);
    } else {
        tf::emit_csv(res, cfg.output_path);
        write_text(meta_path(cfg.output_path), sweep_metadata(cfg, res).dump(2) + "\n");
        if (cfg.emit_svg) tf::emit_svg(res, svg_path(cfg.output_path));
    }
    return res.any_failed() ? kExitNumeric : kExitOk;
}

tf::SweepConfig make_config(const Options& o, tf::SweepMode mode) {
    tf::SweepConfig cfg;
    cfg.r_values = tf::parse_r_spec(o.r_spec);
    cfg.N_values = tf::parse_n_list(o.n_spec);
    cfg.precision_bits = o.precision_bits;
    cfg.eig_precision_bits = o.eig_precision_bits;
    cfg.tol = o.tol;
    cfg.mode = mode;
    cfg.output_path = o.out;
    cfg.emit_svg = o.svg;
    cfg.allow_precision_loss = o.allow_precision_loss;
    if (cfg.emit_svg && o.out.empty()) throw tf::ConfigError("--svg needs --out");
    cfg.validate();
    return cfg;
}

int run_validate(const Options& o) {
    const auto grid = tf::parse_r_spec(o.r_spec);
    for (double r : grid)
        if (!(r >= 0.0 && r < 1.0)) throw tf::ConfigError("r must lie in [0, 1)");
    tf::ValidationOptions vo;
    vo.quadrature_order = o.quad_order;
    vo.precision = tf::Precision{o.precision_bits};
    vo.self_check = !o.no_self_check;
    if (o.quad_order < o.kmax + o.nmax + 8 || (vo.self_check && o.quad_order / 2 < o.kmax + o.nmax + 8))
        throw tf::ConfigError("--quad-order too small for kmax + nmax");
    const auto reports = tf::validate_matrix(o.kmax, o.nmax, grid, o.tol, vo);
    std::size_t flagged = 0;
    double worst = 0.0;
    for (const auto& rep : reports) {
        flagged += rep.flagged ? 1 : 0;
        worst = std::max(worst, rep.rel_err);
    }
    if (o.out.empty()) {
        tf::emit_reports_csv(reports, std::cout);
    } else {
        std::ostringstream buf;
        tf::emit_reports_csv(reports, buf);
        write_text(o.out, buf.str());
    }
    std::cerr << reports.size() << " entries checked, " << flagged << " flagged, max relative error "
              << tf::format_number(worst) << '\n';
    return flagged ? kExitValidation : kExitOk;
}

int run_entry(const Options& o) {
    const auto rs = tf::parse_r_spec(o.r_spec);
    if (rs.size() != 1) throw tf::ConfigError("entry takes a single r");
    if (o.k < 0 || o.n < 0) throw tf::ConfigError("--k and --n must be nonnegative");
    const auto params = tf::MapParams::make_below_one(rs.front());
    tf::EntryOptions eo;
    eo.precision = tf::Precision{o.precision_bits};
    eo.check_precision = !o.allow_precision_loss;
    tf::PrecisionScope scope(eo.precision);
    const tf::HighReal v = tf::matrix_entry_high(o.k, o.n, params, eo);
    const auto digits = static_cast<std::streamsize>(std::floor(o.precision_bits * std::log10(2.0)));
    std::cout << v.str(digits, std::ios::scientific) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated transfer-operator matrices of the tent-Farey family"};
    app.require_subcommand(1);
    Options o1, o2a, o2b, ov, oe;

    auto add_sweep_flags = [](CLI::App* sub, Options& o, const std::string& r_default, const std::string& n_default) {
        sub->add_option("--r", o.r_spec, "r value or start:stop:step")->default_val(r_default);
        sub->add_option("--N", o.n_spec, "comma-separated truncation sizes")->default_val(n_default);
        sub->add_option("--precision-bits", o.precision_bits, "mantissa bits for matrix entries")
            ->default_val(256)
            ->check(CLI::Range(53u, 100000u));
        sub->add_option("--eig-precision-bits", o.eig_precision_bits,
                        "mantissa bits for the QR iteration (53 runs it in double)")
            ->default_val(53)
            ->check(CLI::Range(53u, 100000u));
        sub->add_option("--tol", o.tol, "eigenpair residual tolerance relative to the Frobenius norm")
            ->default_val(1e-10);
        sub->add_option("--out", o.out, "CSV output path (stdout when omitted)");
        sub->add_flag("--svg", o.svg, "also write an SVG plot next to --out");
        sub->add_flag("--allow-precision-loss", o.allow_precision_loss,
                      "keep entries whose rounding bound exceeds 1e-12");
    };

    auto* fig1 = app.add_subcommand("fig1", "eigenvalues of A_{r,N} over an r grid");
    add_sweep_flags(fig1, o1, "0.01:0.99:0.01", "50");
    auto* fig2a = app.add_subcommand("fig2a", "truncated traces against the exact trace");
    add_sweep_flags(fig2a, o2a, "0.01:0.99:0.01", "10,20,30,40,50,60");
    auto* fig2b = app.add_subcommand("fig2b", "eigenvalues of A_{r,N} with sum curves k = 1,3,5,7,9");
    add_sweep_flags(fig2b, o2b, "0.01:0.99:0.01", "50");

    auto* val = app.add_subcommand("validate", "check closed-form entries against quadrature");
    val->add_option("--r", ov.r_spec, "r value or start:stop:step")->default_val("0.1:0.9:0.1");
    val->add_option("--kmax", ov.kmax, "largest row index")->default_val(10)->check(CLI::NonNegativeNumber);
    val->add_option("--nmax", ov.nmax, "largest column index")->default_val(10)->check(CLI::NonNegativeNumber);
    val->add_option("--tol", ov.tol, "relative error above which an entry is flagged")->default_val(1e-8);
    val->add_option("--quad-order", ov.quad_order, "Gauss-Laguerre order")->default_val(128);
    val->add_option("--precision-bits", ov.precision_bits, "mantissa bits")
        ->default_val(256)
        ->check(CLI::Range(53u, 100000u));
    val->add_flag("--no-self-check", ov.no_self_check, "skip the half-order refinement check");
    val->add_option("--out", ov.out, "CSV output path (stdout when omitted)");

    auto* ent = app.add_subcommand("entry", "print one matrix entry a_kn");
    ent->add_option("--k", oe.k, "row index")->required();
    ent->add_option("--n", oe.n, "column index")->required();
    ent->add_option("--r", oe.r_spec, "map parameter")->required();
    ent->add_option("--precision-bits", oe.precision_bits, "mantissa bits")
        ->default_val(256)
        ->check(CLI::Range(53u, 100000u));
    ent->add_flag("--allow-precision-loss", oe.allow_precision_loss, "skip the rounding-bound check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (fig1->parsed()) {
            const auto cfg = make_config(o1, tf::SweepMode::eigs);
            return finish_sweep(cfg, tf::run_figure1(cfg));
        }
        if (fig2a->parsed()) {
            const auto cfg = make_config(o2a, tf::SweepMode::trace);
            return finish_sweep(cfg, tf::run_figure2a(cfg));
        }
        if (fig2b->parsed()) {
            const auto cfg = make_config(o2b, tf::SweepMode::eigs);
            return finish_sweep(cfg, tf::run_figure2b(cfg));
        }
        if (val->parsed()) return run_validate(ov);
        if (ent->parsed()) return run_entry(oe);
    } catch (const tf::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const tf::DomainError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const tf::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const tf::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitConfig;
}
