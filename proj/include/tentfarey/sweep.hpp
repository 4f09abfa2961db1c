#pragma once

// Experiment driver: eigenvalue sweeps over r, truncated-trace convergence in
// N, and their CSV/SVG output.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eigensolver.hpp"
#include "errors.hpp"
#include "maps.hpp"
#include "operator_matrix.hpp"
#include "validation.hpp"

namespace tentfarey {

enum class SweepMode { eigs, trace, validate, entry };

/// Which figure a sweep reproduces; selects the CSV schema.
enum class SweepKind { figure1, figure2a, figure2b };

inline constexpr std::array<int, 5> kSumCurveOrders{1, 3, 5, 7, 9};

/// r above this is accepted but tagged as degraded in output metadata.
inline constexpr double kDegradedAbove = 0.95;

struct SweepConfig {
    std::vector<double> r_values;
    std::vector<int> N_values;
    unsigned precision_bits = 256;
    /// Eigenpair residual tolerance relative to ||A||_F.
    double tol = 1e-10;
    SweepMode mode = SweepMode::eigs;
    std::filesystem::path output_path;
    bool emit_svg = false;
    /// Above 53 the QR iteration itself runs in HighReal at this precision.
    unsigned eig_precision_bits = 53;
    /// Skip the per-entry precision check (for reproducing double runs).
    bool allow_precision_loss = false;

    void validate() const {
        if (r_values.empty()) throw ConfigError("no r values given");
        if (N_values.empty()) throw ConfigError("no N values given");
        for (double r : r_values)
            if (!(r >= 0.0 && r < 1.0)) throw ConfigError("r must lie in [0, 1), got " + std::to_string(r));
        if (!std::is_sorted(r_values.begin(), r_values.end()))
            throw ConfigError("r values must be sorted ascending");
        for (int n : N_values)
            if (n < 1) throw ConfigError("N must be positive, got " + std::to_string(n));
        if (precision_bits < 53) throw ConfigError("precision must be at least 53 bits");
        if (eig_precision_bits < 53) throw ConfigError("eigensolver precision must be at least 53 bits");
        if (!(tol > 0)) throw ConfigError("tolerance must be positive");
    }

    EntryOptions entry_options() const {
        EntryOptions o;
        o.precision = Precision{precision_bits};
        o.check_precision = !allow_precision_loss;
        return o;
    }
};

struct SweepRow {
    double r = 0.0;
    int N = 0;
    bool degraded = false;
    std::vector<std::complex<double>> eigenvalues;
    std::vector<double> residuals;
    double frobenius_norm = 0.0;
    /// Diagonal sum at entry precision.
    double trace_trunc = std::numeric_limits<double>::quiet_NaN();
    double trace_analytic = std::numeric_limits<double>::quiet_NaN();
    std::array<double, 5> sum_curves{};
    /// Nonempty when this row failed; the sweep carries on.
    std::string error;

    bool ok() const { return error.empty(); }

    /// |sum of eigenvalues - trace_trunc|.
    double eigen_trace_gap() const {
        std::complex<double> s = 0.0;
        for (const auto& z : eigenvalues) s += z;
        return std::abs(s - trace_trunc);
    }
};

struct SweepResult {
    SweepKind kind = SweepKind::figure1;
    unsigned precision_bits = 256;
    std::vector<SweepRow> rows;

    bool empty() const { return rows.empty(); }
    bool any_failed() const {
        return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); });
    }
};

// ---------------------------------------------------------------------------
// Argument parsing

namespace detail {

inline double parse_double(std::string_view s, const char* what) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end)
        throw ConfigError(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
    return v;
}

// Decimal digits after the point, for exact grid generation.
inline int decimals(std::string_view s) {
    const auto dot = s.find('.');
    if (dot == std::string_view::npos) return 0;
    const auto e = s.find_first_of("eE");
    if (e != std::string_view::npos) return -1;
    return static_cast<int>(s.size() - dot - 1);
}

}  // namespace detail

/// "0.3" or "start:stop:step" (inclusive). Grid points are start + i*step
/// computed in scaled integers, so 0.01:0.99:0.01 yields the same doubles as
/// parsing "0.01", "0.02", ...
inline std::vector<double> parse_r_spec(std::string_view spec) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto c = spec.find(':', pos);
        parts.push_back(spec.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
        if (c == std::string_view::npos) break;
        pos = c + 1;
    }
    if (parts.size() == 1) return {detail::parse_double(parts[0], "r")};
    if (parts.size() != 3) throw ConfigError("r range must be start:stop:step, got '" + std::string(spec) + "'");
    const double start = detail::parse_double(parts[0], "r start");
    const double stop = detail::parse_double(parts[1], "r stop");
    const double step = detail::parse_double(parts[2], "r step");
    if (!(step > 0)) throw ConfigError("r step must be positive");
    if (stop < start) throw ConfigError("r stop must not be below start");
    int dec = 0;
    for (auto p : parts) {
        const int d = detail::decimals(p);
        if (d < 0) {
            dec = -1;
            break;
        }
        dec = std::max(dec, d);
    }
    std::vector<double> out;
    if (dec >= 0 && dec <= 12) {
        const double scale = std::pow(10.0, dec);
        const long long a = std::llround(start * scale);
        const long long b = std::llround(stop * scale);
        const long long s = std::llround(step * scale);
        if (s <= 0) throw ConfigError("r step too small");
        for (long long v = a; v <= b; v += s) out.push_back(static_cast<double>(v) / scale);
    } else {
        const long long count = std::llround(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
}

/// "10,20,30".
inline std::vector<int> parse_n_list(std::string_view spec) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto c = spec.find(',', pos);
        const auto tok = spec.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos);
        int v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty())
            throw ConfigError("cannot parse N list '" + std::string(spec) + "'");
        out.push_back(v);
        if (c == std::string_view::npos) break;
        pos = c + 1;
    }
    return out;
}

/// Shortest decimal string that parses back to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

// ---------------------------------------------------------------------------
// Runs

namespace detail {

inline SweepRow eigen_row(double r, int N, const SweepConfig& cfg) {
    SweepRow row;
    row.r = r;
    row.N = N;
    row.degraded = r > kDegradedAbove;
    const MapParams params = MapParams::make_below_one(r);
    row.trace_analytic = analytic_trace(params);
    EigenOptions eopts;
    eopts.tol = cfg.tol;
    try {
        const auto op = build_truncation(N, params, cfg.entry_options());
        row.trace_trunc = op.trace;
        Spectrum s;
        if (cfg.eig_precision_bits > 53) {
            EntryOptions hi = cfg.entry_options();
            hi.precision = Precision{std::max(cfg.eig_precision_bits, cfg.precision_bits)};
            s = eigenvalues_extended(N, params, hi, eopts);
        } else {
            s = eigenvalues(op, eopts);
        }
        row.eigenvalues = std::move(s.eigenvalues);
        row.residuals = std::move(s.residuals);
        row.frobenius_norm = s.frobenius_norm;
        const double allowed = 1e-8 * N * row.frobenius_norm;
        if (row.eigen_trace_gap() > allowed)
            row.error = "eigenvalue sum differs from trace by " + format_number(row.eigen_trace_gap());
    } catch (const NumericError& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace detail

/// Eigenvalues of A_{r,N} for every configured (r, N).
inline SweepResult run_figure1(const SweepConfig& cfg) {
    cfg.validate();
    if (cfg.mode != SweepMode::eigs) throw ConfigError("figure 1 sweep needs eigs mode");
    SweepResult out;
    out.kind = SweepKind::figure1;
    out.precision_bits = cfg.precision_bits;
    for (double r : cfg.r_values)
        for (int N : cfg.N_values) out.rows.push_back(detail::eigen_row(r, N, cfg));
    return out;
}

/// Truncated traces against the analytic trace for every configured (r, N).
inline SweepResult run_figure2a(const SweepConfig& cfg) {
    cfg.validate();
    if (cfg.mode != SweepMode::trace) throw ConfigError("figure 2a sweep needs trace mode");
    SweepResult out;
    out.kind = SweepKind::figure2a;
    out.precision_bits = cfg.precision_bits;
    std::vector<int> ns = cfg.N_values;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    const int nmax = ns.back();
    for (double r : cfg.r_values) {
        const MapParams params = MapParams::make_below_one(r);
        const double exact = analytic_trace(params);
        std::vector<double> traces;
        std::string error;
        try {
            traces = truncated_traces(nmax, params, cfg.entry_options());
        } catch (const NumericError& e) {
            error = e.what();
        }
        for (int N : ns) {
            SweepRow row;
            row.r = r;
            row.N = N;
            row.degraded = r > kDegradedAbove;
            row.trace_analytic = exact;
            row.error = error;
            if (error.empty()) row.trace_trunc = traces[static_cast<std::size_t>(N - 1)];
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

/// Eigenvalues of A_{r,N} next to the sums of the k-th eigenvalues of M_r and
/// N_r for k = 1, 3, 5, 7, 9. One N only.
inline SweepResult run_figure2b(const SweepConfig& cfg) {
    cfg.validate();
    if (cfg.mode != SweepMode::eigs) throw ConfigError("figure 2b sweep needs eigs mode");
    if (cfg.N_values.size() != 1) throw ConfigError("figure 2b sweep takes exactly one N");
    SweepResult out;
    out.kind = SweepKind::figure2b;
    out.precision_bits = cfg.precision_bits;
    for (double r : cfg.r_values) {
        SweepRow row = detail::eigen_row(r, cfg.N_values.front(), cfg);
        const MapParams params = MapParams::make_below_one(r);
        for (std::size_t i = 0; i < kSumCurveOrders.size(); ++i)
            row.sum_curves[i] = sum_curve(kSumCurveOrders[i], params);
        out.rows.push_back(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::vector<const SweepRow*> sorted_rows(const SweepResult& result) {
    std::vector<const SweepRow*> rows;
    for (const auto& r : result.rows) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow* a, const SweepRow* b) {
        if (a->r != b->r) return a->r < b->r;
        return a->N < b->N;
    });
    return rows;
}

}  // namespace detail

/// Writes the CSV schema of the sweep kind. Failed rows are left out; their
/// errors belong in the run metadata.
///
///   figure1:  r,N,index,eig_re,eig_im,residual
///   figure2a: r,N,trace_trunc,trace_analytic,abs_err
///   figure2b: r,N,sum_k1,sum_k3,sum_k5,sum_k7,sum_k9,eig_re_0,...,eig_re_{N-1}
inline void emit_csv(const SweepResult& result, std::ostream& os) {
    const auto rows = detail::sorted_rows(result);
    switch (result.kind) {
        case SweepKind::figure1:
            os << "r,N,index,eig_re,eig_im,residual\n";
            for (const SweepRow* row : rows) {
                if (!row->ok()) continue;
                for (std::size_t i = 0; i < row->eigenvalues.size(); ++i)
                    os << format_number(row->r) << ',' << row->N << ',' << i << ','
                       << format_number(row->eigenvalues[i].real()) << ','
                       << format_number(row->eigenvalues[i].imag()) << ','
                       << format_number(row->residuals[i]) << '\n';
            }
            break;
        case SweepKind::figure2a:
            os << "r,N,trace_trunc,trace_analytic,abs_err\n";
            for (const SweepRow* row : rows) {
                if (!row->ok()) continue;
                os << format_number(row->r) << ',' << row->N << ',' << format_number(row->trace_trunc) << ','
                   << format_number(row->trace_analytic) << ','
                   << format_number(std::abs(row->trace_trunc - row->trace_analytic)) << '\n';
            }
            break;
        case SweepKind::figure2b: {
            const int n = rows.empty() ? 0 : rows.front()->N;
            os << "r,N";
            for (int k : kSumCurveOrders) os << ",sum_k" << k;
            for (int i = 0; i < n; ++i) os << ",eig_re_" << i;
            os << '\n';
            for (const SweepRow* row : rows) {
                if (!row->ok()) continue;
                os << format_number(row->r) << ',' << row->N;
                for (double v : row->sum_curves) os << ',' << format_number(v);
                for (const auto& z : row->eigenvalues) os << ',' << format_number(z.real());
                os << '\n';
            }
            break;
        }
    }
}

inline void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ostringstream buf;
    emit_csv(result, buf);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << buf.str();
    if (!f) throw IoError("write to '" + path.string() + "' failed");
}

/// k,n,r,closed_form,oracle_value,abs_err,rel_err,quadrature_order,refinement_delta,flagged
inline void emit_reports_csv(const std::vector<OracleReport>& reports, std::ostream& os) {
    os << "k,n,r,closed_form,oracle_value,abs_err,rel_err,quadrature_order,refinement_delta,flagged\n";
    for (const auto& rep : reports)
        os << rep.k << ',' << rep.n << ',' << format_number(rep.r) << ',' << format_number(rep.closed_form) << ','
           << format_number(rep.oracle_value) << ',' << format_number(rep.abs_err) << ','
           << format_number(rep.rel_err) << ',' << rep.quadrature_order << ','
           << format_number(rep.refinement_delta) << ',' << (rep.flagged ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

struct Series {
    std::vector<std::pair<double, double>> points;
    std::string color;
    bool dashed = false;
    double width = 1.0;
};

inline std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

inline std::string palette(std::size_t i) {
    static constexpr std::array<const char*, 8> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                       "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    return colors[i % colors.size()];
}

inline std::string render_svg(const std::vector<Series>& series, double ymin, double ymax, const std::string& title,
                              const std::string& ylabel) {
    constexpr double width = 800, height = 520, left = 70, right = 20, top = 40, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    if (!(ymax > ymin)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto sx = [&](double r) { return left + r * pw; };
    auto sy = [&](double y) {
        const double c = std::clamp(y, ymin, ymax);
        return top + (ymax - c) / (ymax - ymin) * ph;
    };
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
       << "<text x=\"" << fixed2(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"15\">" << title << "</text>\n"
       << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 10; ++i) {
        const double r = i / 10.0;
        os << "<line x1=\"" << fixed2(sx(r)) << "\" y1=\"" << fixed2(top + ph) << "\" x2=\"" << fixed2(sx(r))
           << "\" y2=\"" << fixed2(top + ph + 5) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << fixed2(sx(r)) << "\" y=\"" << fixed2(top + ph + 20)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(r)
           << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double y = ymin + (ymax - ymin) * i / 5.0;
        os << "<line x1=\"" << fixed2(left - 5) << "\" y1=\"" << fixed2(sy(y)) << "\" x2=\"" << fixed2(left)
           << "\" y2=\"" << fixed2(sy(y)) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << fixed2(left - 8) << "\" y=\"" << fixed2(sy(y) + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(y) << "</text>\n";
    }
    os << "<text x=\"" << fixed2(left + pw / 2) << "\" y=\"" << fixed2(height - 10)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">r</text>\n"
       << "<text x=\"16\" y=\"" << fixed2(top + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"13\" transform=\"rotate(-90 16 " << fixed2(top + ph / 2) << ")\">" << ylabel << "</text>\n";
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << fixed2(s.width) << '"';
        if (s.dashed) os << " stroke-dasharray=\"6 4\"";
        os << " points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            if (i) os << ' ';
            os << fixed2(sx(s.points[i].first)) << ',' << fixed2(sy(s.points[i].second));
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace detail

/// Standalone SVG line plot against r. Figure 1 draws one curve per
/// eigenvalue index (real parts); figure 2a one curve per N plus the analytic
/// trace; figure 2b the eigenvalue curves with the sum curves dashed.
inline std::string render_svg(const SweepResult& result) {
    if (result.empty()) throw DomainError("emit_svg: empty sweep result");
    const auto rows = detail::sorted_rows(result);
    std::vector<detail::Series> series;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    auto extend = [&](double y) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    std::string title, ylabel;

    if (result.kind == SweepKind::figure2a) {
        title = "trace of A_{r,N} and of P_r";
        ylabel = "trace";
        std::vector<int> ns;
        for (const SweepRow* row : rows) ns.push_back(row->N);
        std::sort(ns.begin(), ns.end());
        ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
        for (std::size_t i = 0; i < ns.size(); ++i) {
            detail::Series s{{}, detail::palette(i), false, 1.2};
            for (const SweepRow* row : rows)
                if (row->N == ns[i] && row->ok()) {
                    s.points.emplace_back(row->r, row->trace_trunc);
                    extend(row->trace_trunc);
                }
            series.push_back(std::move(s));
        }
        const double cap = ymax * 1.25;
        detail::Series exact{{}, "black", false, 1.8};
        double last_r = -1;
        for (const SweepRow* row : rows)
            if (row->r != last_r) {
                exact.points.emplace_back(row->r, row->trace_analytic);
                extend(std::min(row->trace_analytic, cap));
                last_r = row->r;
            }
        series.push_back(std::move(exact));
        ymin = std::min(ymin, 0.0);
    } else {
        title = result.kind == SweepKind::figure1 ? "eigenvalues of A_{r,N}"
                                                  : "eigenvalues of A_{r,N} and sum curves k = 1,3,5,7,9";
        ylabel = "eigenvalue (real part)";
        std::size_t count = 0;
        for (const SweepRow* row : rows) count = std::max(count, row->eigenvalues.size());
        const int first_n = rows.front()->N;
        for (std::size_t i = 0; i < count; ++i) {
            detail::Series s{{}, result.kind == SweepKind::figure1 ? detail::palette(i) : "#7f7f7f", false, 1.0};
            for (const SweepRow* row : rows)
                if (row->N == first_n && row->ok() && i < row->eigenvalues.size()) {
                    s.points.emplace_back(row->r, row->eigenvalues[i].real());
                    extend(row->eigenvalues[i].real());
                }
            series.push_back(std::move(s));
        }
        if (result.kind == SweepKind::figure2b) {
            for (std::size_t c = 0; c < kSumCurveOrders.size(); ++c) {
                detail::Series s{{}, detail::palette(c), true, 1.6};
                for (const SweepRow* row : rows) {
                    s.points.emplace_back(row->r, row->sum_curves[c]);
                    extend(row->sum_curves[c]);
                }
                series.push_back(std::move(s));
            }
        }
    }
    if (!std::isfinite(ymin) || !std::isfinite(ymax)) {
        ymin = 0.0;
        ymax = 1.0;
    }
    const double pad = 0.03 * (ymax - ymin);
    return detail::render_svg(series, ymin - pad, ymax + pad, title, ylabel);
}

inline void emit_svg(const SweepResult& result, const std::filesystem::path& path) {
    const std::string svg = render_svg(result);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << svg;
    if (!f) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace tentfarey
