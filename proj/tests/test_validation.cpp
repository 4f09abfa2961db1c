#include <cmath>

#include <gtest/gtest.h>

#include "tentfarey/validation.hpp"

namespace tf = tentfarey;

namespace {

// One rule shared by the tests below; building it at Q = 128 takes a moment.
const tf::QuadratureOracle<tf::HighReal>& oracle128() {
    static const tf::QuadratureOracle<tf::HighReal> o = [] {
        tf::PrecisionScope scope(tf::Precision::high());
        return tf::QuadratureOracle<tf::HighReal>(tf::gauss_laguerre_rule<tf::HighReal>(128), 10);
    }();
    return o;
}

}  // namespace

TEST(Oracle, TopLeftEntry) {
    tf::PrecisionScope scope(tf::Precision::high());
    for (double r : {0.0, 0.25, 0.9}) {
        const tf::HighReal got = oracle128().entry(0, 0, tf::HighReal(r));
        EXPECT_NEAR(tf::to_double(got), (2.0 - r) / 2.0, 1e-30) << r;
    }
}

TEST(Oracle, PartsSeparatelyMatchClosedForm) {
    tf::PrecisionScope scope(tf::Precision::high());
    for (double r : {0.1, 0.5, 0.9}) {
        const tf::HighReal rr(r);
        for (int k = 0; k <= 10; k += 2)
            for (int n = 0; n <= 10; n += 3) {
                const auto parts = tf::entry_parts<tf::HighReal>(k, n, rr);
                const tf::HighReal scale(k + 1);
                const tf::HighReal m = oracle128().m_part(k, n, rr) / scale;
                const tf::HighReal nn = oracle128().n_part(k, n, rr) / scale;
                EXPECT_LT(tf::to_double(abs(m - parts.m_part)), 1e-30) << k << " " << n;
                EXPECT_LT(tf::to_double(abs(nn - parts.n_part)), 1e-30) << k << " " << n;
            }
    }
}

TEST(Oracle, FreeFunctionsAgreeWithClass) {
    tf::PrecisionScope scope(tf::Precision::high());
    const auto params = tf::MapParams::make(0.3);
    const auto rule = tf::gauss_laguerre_rule<tf::HighReal>(40);
    const tf::QuadratureOracle<tf::HighReal> o(rule, 5);
    const tf::HighReal r(0.3);
    EXPECT_EQ(tf::oracle_entry_m(3, 4, params, rule), o.m_part(3, 4, r));
    EXPECT_EQ(tf::oracle_entry_n(3, 4, params, rule), o.n_part(3, 4, r));
}

TEST(Oracle, RefinementConverges) {
    tf::PrecisionScope scope(tf::Precision::high());
    const tf::QuadratureOracle<tf::HighReal> coarse(tf::gauss_laguerre_rule<tf::HighReal>(64), 10);
    const tf::HighReal r(0.7);
    for (int k : {0, 5, 10})
        for (int n : {0, 5, 10}) {
            const tf::HighReal delta = abs(coarse.entry(k, n, r) - oracle128().entry(k, n, r));
            EXPECT_LT(tf::to_double(delta), 1e-20) << k << " " << n;
        }
}

TEST(Oracle, RejectsUnderresolvedRule) {
    const auto rule = tf::gauss_laguerre_rule<double>(12);
    const auto params = tf::MapParams::make(0.5);
    EXPECT_THROW(tf::oracle_entry_m(3, 3, params, rule), tf::DomainError);
    EXPECT_THROW(tf::oracle_entry_m(0, 0, tf::MapParams::make(1.0), rule), tf::DomainError);
    EXPECT_THROW(oracle128().entry(11, 0, tf::HighReal(0.5)), tf::DomainError);
}

TEST(ValidateMatrix, EmptyGridGivesNoReports) {
    EXPECT_TRUE(tf::validate_matrix(4, 4, {}, 1e-8).empty());
}

TEST(ValidateMatrix, SmallRunHasNoFlags) {
    tf::ValidationOptions opts;
    opts.quadrature_order = 48;
    const auto reports = tf::validate_matrix(5, 6, {0.2, 0.6}, 1e-8, opts);
    ASSERT_EQ(reports.size(), 2u * 6u * 7u);
    EXPECT_EQ(reports.front().r, 0.2);
    EXPECT_EQ(reports.front().k, 0);
    EXPECT_EQ(reports.back().k, 5);
    EXPECT_EQ(reports.back().n, 6);
    for (const auto& rep : reports) {
        EXPECT_FALSE(rep.flagged);
        EXPECT_EQ(rep.quadrature_order, 48);
        EXPECT_GE(rep.refinement_delta, 0.0);
        EXPECT_LE(rep.rel_err, 1e-8);
    }
}

TEST(ValidateMatrix, ImpossibleToleranceFlagsEntries) {
    tf::ValidationOptions opts;
    opts.quadrature_order = 24;
    opts.self_check = false;
    const auto reports = tf::validate_matrix(3, 3, {0.5}, 1e-300, opts);
    EXPECT_TRUE(std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.flagged; }));
    for (const auto& rep : reports) EXPECT_EQ(rep.refinement_delta, -1.0);
}

TEST(ValidateMatrix, RejectsBadArguments) {
    EXPECT_THROW(tf::validate_matrix(3, 3, {0.5}, 0.0), tf::DomainError);
    EXPECT_THROW(tf::validate_matrix(3, 3, {1.0}, 1e-8), tf::DomainError);
    tf::ValidationOptions opts;
    opts.quadrature_order = 20;
    EXPECT_THROW(tf::validate_matrix(10, 10, {0.5}, 1e-8, opts), tf::DomainError);
}
