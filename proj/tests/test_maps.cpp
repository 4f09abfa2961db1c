#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "tentfarey/maps.hpp"

namespace tf = tentfarey;

namespace {

const double kRs[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

}

TEST(MapParams, RangeChecks) {
    EXPECT_NO_THROW(tf::MapParams::make(0.0));
    EXPECT_NO_THROW(tf::MapParams::make(1.0));
    EXPECT_THROW(tf::MapParams::make(-0.01), tf::DomainError);
    EXPECT_THROW(tf::MapParams::make(1.01), tf::DomainError);
    EXPECT_THROW(tf::MapParams::make(std::nan("")), tf::DomainError);
    EXPECT_THROW(tf::MapParams::make_below_one(1.0), tf::DomainError);
    EXPECT_DOUBLE_EQ(tf::MapParams::make(0.3).rho, 1.7);
}

TEST(Map, TentAndFareyEndpoints) {
    const auto tent = tf::MapParams::make(0.0);
    EXPECT_DOUBLE_EQ(tf::f_r_eval(0.25, tent), 0.5);
    EXPECT_DOUBLE_EQ(tf::f_r_eval(0.75, tent), 0.5);
    const auto farey = tf::MapParams::make(1.0);
    EXPECT_DOUBLE_EQ(tf::f_r_eval(0.25, farey), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(tf::f_r_eval(0.75, farey), 1.0 / 3.0);
    for (double r : kRs) {
        const auto p = tf::MapParams::make(r);
        EXPECT_DOUBLE_EQ(tf::f_r_eval(0.0, p), 0.0);
        EXPECT_DOUBLE_EQ(tf::f_r_eval(0.5, p), 1.0);
        EXPECT_DOUBLE_EQ(tf::f_r_eval(1.0, p), 0.0);
    }
}

TEST(Map, BranchesAreMonotone) {
    for (double r : kRs) {
        const auto p = tf::MapParams::make(r);
        double prev = tf::f_r_eval(0.0, p);
        for (int i = 1; i <= 500; ++i) {
            const double y = tf::f_r_eval(i / 1000.0, p);
            EXPECT_GT(y, prev);
            prev = y;
        }
        for (int i = 501; i <= 1000; ++i) {
            const double y = tf::f_r_eval(i / 1000.0, p);
            EXPECT_LT(y, prev);
            prev = y;
        }
    }
}

TEST(Map, RejectsPointsOutsideUnitInterval) {
    const auto p = tf::MapParams::make(0.5);
    EXPECT_THROW(tf::f_r_eval(-1e-9, p), tf::DomainError);
    EXPECT_THROW(tf::f_r_eval(1.5, p), tf::DomainError);
    EXPECT_THROW(tf::inverse_branches(2.0, p), tf::DomainError);
}

TEST(Map, InverseBranchesRoundTrip) {
    for (double r : kRs) {
        const auto p = tf::MapParams::make(r);
        for (int i = 0; i <= 1000; ++i) {
            const double x = i / 1000.0;
            const auto [y0, y1] = tf::inverse_branches(x, p);
            EXPECT_LE(y0, 0.5);
            EXPECT_GE(y1, 0.5);
            EXPECT_NEAR(tf::f_r_eval(y0, p), x, 1e-14);
            EXPECT_NEAR(tf::f_r_eval(y1, p), x, 1e-14);
        }
    }
}

TEST(Transfer, InvariantDensityIsFixedOnFineGrid) {
    for (double r : kRs) {
        const auto p = tf::MapParams::make(r);
        auto g = [&](double x) { return tf::invariant_density(x, p); };
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double x = i / 9999.0;
            worst = std::max(worst, std::abs(tf::apply_transfer_pointwise(g, x, p) - g(x)));
        }
        EXPECT_LE(worst, 1e-12) << "r = " << r;
    }
}

TEST(Transfer, PreservesIntegrals) {
    using boost::math::quadrature::gauss_kronrod;
    for (double r : {0.0, 0.35, 0.8}) {
        const auto p = tf::MapParams::make(r);
        auto f = [](double x) { return 1.0 + x * x * std::cos(3.0 * x); };
        auto pf = [&](double x) { return tf::apply_transfer_pointwise(f, x, p); };
        const double a = gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-14);
        const double b = gauss_kronrod<double, 31>::integrate(pf, 0.0, 1.0, 15, 1e-14);
        EXPECT_NEAR(a, b, 1e-12) << r;
    }
}

TEST(Transfer, FareyDensityPoleThrows) {
    const auto p = tf::MapParams::make(1.0);
    EXPECT_THROW(tf::invariant_density(0.0, p), tf::DomainError);
    EXPECT_DOUBLE_EQ(tf::invariant_density(0.5, p), 2.0);
}
