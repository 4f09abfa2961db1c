#include <cmath>

#include <gtest/gtest.h>

#include "tentfarey/operator_matrix.hpp"

namespace tf = tentfarey;

namespace {

tf::HighReal to_high(const tf::Rational& q) {
    return tf::HighReal(tf::HighReal(numerator(q).str()) / tf::HighReal(denominator(q).str()));
}

tf::Rational power_of_two(int e) {
    return e >= 0 ? tf::Rational(tf::BigInt(1) << e) : tf::Rational(1, tf::BigInt(1) << -e);
}

}  // namespace

TEST(Entry, TopLeftIsHalfRho) {
    for (const tf::Rational r : {tf::Rational(0), tf::Rational(1, 4), tf::Rational(3, 5), tf::Rational(99, 100)})
        EXPECT_EQ(tf::matrix_entry_exact(0, 0, r), (2 - r) / 2);
    EXPECT_DOUBLE_EQ(tf::matrix_entry(0, 0, tf::MapParams::make(0.3)), 0.85);
}

TEST(Entry, HighPrecisionMatchesExact) {
    const tf::Rational rs[] = {tf::Rational(1, 4), tf::Rational(1, 2), tf::Rational(7, 8)};
    for (const auto& r : rs) {
        const auto params = tf::MapParams::make(r.convert_to<double>());
        tf::PrecisionScope scope(tf::Precision::high());
        for (int k = 0; k <= 10; ++k)
            for (int n = 0; n <= 10; ++n) {
                const tf::HighReal got = tf::matrix_entry_high(k, n, params);
                const tf::HighReal exact = to_high(tf::matrix_entry_exact(k, n, r));
                EXPECT_LT(tf::to_double(abs(got - exact)), 1e-60) << k << " " << n;
            }
    }
}

TEST(Entry, DoubleMatchesExactForSmallIndices) {
    const tf::Rational r(3, 8);
    const auto params = tf::MapParams::make(0.375);
    tf::EntryOptions native;
    native.precision = tf::Precision::native();
    for (int k = 0; k < 8; ++k)
        for (int n = 0; n < 8; ++n)
            EXPECT_NEAR(tf::matrix_entry(k, n, params, native), tf::matrix_entry_exact(k, n, r).convert_to<double>(),
                        1e-12);
}

TEST(Entry, TentMatrixIsTriangular) {
    // Diagonal 1, 0, 1/4, 0, 1/16, ...: the powers of 4 sit at even indices.
    for (int k = 0; k <= 12; ++k)
        for (int n = 0; n <= 12; ++n) {
            const tf::Rational a = tf::matrix_entry_exact(k, n, 0);
            if (k > n)
                EXPECT_EQ(a, 0) << k << " " << n;
            else if (k == n)
                EXPECT_EQ(a, k % 2 == 0 ? power_of_two(-k) : tf::Rational(0)) << k;
        }
}

TEST(Entry, PartsAddUpToEntry) {
    tf::PrecisionScope scope(tf::Precision::high());
    const tf::HighReal r("0.3");
    for (int k = 0; k <= 6; ++k)
        for (int n = 0; n <= 6; ++n) {
            const auto parts = tf::entry_parts<tf::HighReal>(k, n, r);
            const auto whole = tf::entry_value<tf::HighReal>(k, n, r).value;
            EXPECT_LT(tf::to_double(abs(parts.m_part + parts.n_part - whole)), 1e-70);
        }
}

TEST(Entry, RejectsBadArguments) {
    EXPECT_THROW(tf::matrix_entry(-1, 0, tf::MapParams::make(0.3)), tf::DomainError);
    EXPECT_THROW(tf::matrix_entry(0, 0, tf::MapParams::make(1.0)), tf::DomainError);
    EXPECT_THROW(tf::matrix_entry_exact(0, 0, 1), tf::DomainError);
    tf::EntryOptions low;
    low.precision = tf::Precision{32};
    EXPECT_THROW(tf::matrix_entry(0, 0, tf::MapParams::make(0.3), low), tf::DomainError);
}

TEST(Truncation, DoubleAssemblyLosesPrecisionAtFifty) {
    tf::EntryOptions native;
    native.precision = tf::Precision::native();
    const auto params = tf::MapParams::make(0.5);
    EXPECT_THROW(tf::build_truncation(50, params, native), tf::PrecisionError);
    native.check_precision = false;
    EXPECT_NO_THROW(tf::build_truncation(50, params, native));
}

TEST(Truncation, TraceIsDiagonalSum) {
    const auto params = tf::MapParams::make(0.4);
    const auto op = tf::build_truncation(20, params);
    double s = 0.0;
    for (std::size_t i = 0; i < 20; ++i) s += op.entries(i, i);
    EXPECT_NEAR(op.trace, s, 1e-14);
    const auto traces = tf::truncated_traces(20, params);
    ASSERT_EQ(traces.size(), 20u);
    EXPECT_NEAR(traces.back(), op.trace, 1e-15);
    EXPECT_DOUBLE_EQ(traces.front(), 0.8);
}

TEST(Truncation, LeadingBlockIsSmallerTruncation) {
    const auto params = tf::MapParams::make(0.7);
    const auto big = tf::build_truncation(12, params);
    const auto small = tf::build_truncation(7, params);
    EXPECT_EQ(big.entries.leading_block(7), small.entries);
}

TEST(Truncation, TentTraceIsPartialGeometricSum) {
    // trace(A_{0,N}) = sum_{j < ceil(N/2)} 4^{-j} = 4/3 (1 - 4^{-ceil(N/2)}).
    const auto traces = tf::truncated_traces(60, tf::MapParams::make(0.0));
    for (int n = 1; n <= 60; ++n) {
        const double expected = 4.0 / 3.0 * (1.0 - std::pow(0.25, (n + 1) / 2));
        EXPECT_NEAR(traces[static_cast<std::size_t>(n - 1)], expected, 1e-15) << n;
        if (n >= 14) EXPECT_NEAR(traces[static_cast<std::size_t>(n - 1)], 4.0 / 3.0, 1e-4) << n;
    }
}

TEST(Truncation, TraceApproachesAnalyticValue) {
    for (double r : {0.1, 0.3, 0.5}) {
        const auto params = tf::MapParams::make(r);
        const auto traces = tf::truncated_traces(60, params);
        const double exact = tf::analytic_trace(params);
        EXPECT_LT(std::abs(traces[59] - exact), std::abs(traces[9] - exact)) << r;
        EXPECT_LT(traces[59], exact);
    }
}

TEST(Analytic, TraceAtTentIsFourThirds) {
    EXPECT_NEAR(tf::analytic_trace(tf::MapParams::make(0.0)), 4.0 / 3.0, 1e-15);
}

TEST(Analytic, TraceEqualsSummedSpectra) {
    for (double r : {0.0, 0.2, 0.5, 0.8, 0.95}) {
        const auto p = tf::MapParams::make(r);
        const auto m = tf::m_spectrum(400, p);
        const auto n = tf::n_spectrum(400, p);
        double s = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) s += m[i] + n[i];
        const double geometric = 1.0 / (p.rho - 1.0) + tf::n_spectrum_base(p) / (1.0 + tf::n_spectrum_base(p));
        EXPECT_NEAR(tf::analytic_trace(p), geometric, 1e-13) << r;
        EXPECT_NEAR(tf::analytic_trace(p), s, 1e-6 + 1e-12 * s) << r;
    }
}

TEST(Analytic, TraceDivergesTowardFarey) {
    double prev = 0.0;
    for (double r = 0.0; r < 0.999; r += 0.05) {
        const double t = tf::analytic_trace(tf::MapParams::make(r));
        EXPECT_GT(t, prev);
        prev = t;
    }
    EXPECT_GT(tf::analytic_trace(tf::MapParams::make(0.999)), 1000.0);
    EXPECT_THROW(tf::analytic_trace(tf::MapParams::make(1.0)), tf::DomainError);
}

TEST(Analytic, TentSpectra) {
    const auto p = tf::MapParams::make(0.0);
    EXPECT_DOUBLE_EQ(tf::n_spectrum_base(p), 0.5);
    const auto m = tf::m_spectrum(4, p);
    const auto n = tf::n_spectrum(4, p);
    EXPECT_EQ(m, (std::vector<double>{0.5, 0.25, 0.125, 0.0625}));
    EXPECT_EQ(n, (std::vector<double>{0.5, -0.25, 0.125, -0.0625}));
}

TEST(Analytic, SumCurves) {
    const auto tent = tf::MapParams::make(0.0);
    for (int k = 1; k <= 9; k += 2) EXPECT_DOUBLE_EQ(tf::sum_curve(k, tent), std::ldexp(1.0, 1 - k));
    const auto p = tf::MapParams::make(0.4);
    EXPECT_NEAR(tf::sum_curve(3, p), std::pow(1.6, -3) + std::pow(tf::n_spectrum_base(p), 3), 1e-16);
    EXPECT_THROW(tf::sum_curve(2, p), tf::DomainError);
    EXPECT_THROW(tf::sum_curve(0, p), tf::DomainError);
    EXPECT_THROW(tf::sum_curve(1, tf::MapParams::make(1.0)), tf::DomainError);
}
