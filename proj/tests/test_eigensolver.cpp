#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tentfarey/eigensolver.hpp"

namespace tf = tentfarey;

TEST(Eigen, OneByOne) {
    tf::Matrix<double> a(1, 1, 0.75);
    const auto s = tf::eigenvalues(a);
    ASSERT_EQ(s.eigenvalues.size(), 1u);
    EXPECT_EQ(s.eigenvalues[0], std::complex<double>(0.75, 0.0));
    EXPECT_LE(s.residuals[0], 1e-15);
}

TEST(Eigen, RecoversPrescribedRealSpectrum) {
    const std::vector<double> d{3.0, -2.0, 1.5, 0.25, 0.125, -0.5, 1e-3, 0.0};
    const auto a = oracle::similar_to_diagonal(d);
    const auto s = tf::eigenvalues(a);
    std::vector<double> sorted = d;
    std::sort(sorted.rbegin(), sorted.rend());
    ASSERT_EQ(s.eigenvalues.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_NEAR(s.eigenvalues[i].real(), sorted[i], 1e-11);
        EXPECT_NEAR(s.eigenvalues[i].imag(), 0.0, 1e-11);
    }
}

TEST(Eigen, SimilarityInvariance) {
    std::vector<double> d;
    for (int i = 0; i < 10; ++i) d.push_back(std::pow(0.6, i));
    const auto a = oracle::similar_to_diagonal(d);
    const auto s = tf::eigenvalues(a);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(s.eigenvalues[i].real(), d[i], 1e-11);
}

TEST(Eigen, ComplexPairsComeConjugate) {
    // Rotation-scaling blocks with eigenvalues 0.5 +- 0.3i and -0.2 +- 0.7i,
    // plus a real 0.9, mixed by a fixed similarity.
    tf::Matrix<double> b(5, 5);
    b(0, 0) = 0.5, b(0, 1) = -0.3, b(1, 0) = 0.3, b(1, 1) = 0.5;
    b(2, 2) = -0.2, b(2, 3) = 0.7, b(3, 2) = -0.7, b(3, 3) = -0.2;
    b(4, 4) = 0.9;
    tf::Matrix<double> p = tf::Matrix<double>::identity(5), pinv(5, 5);
    for (std::size_t i = 0; i + 1 < 5; ++i) p(i, i + 1) = 0.5;
    // Inverse of the unit upper bidiagonal p by back substitution.
    for (std::size_t c = 0; c < 5; ++c)
        for (std::size_t i = 5; i-- > 0;) {
            double v = i == c ? 1.0 : 0.0;
            if (i + 1 < 5) v -= p(i, i + 1) * pinv(i + 1, c);
            pinv(i, c) = v;
        }
    const auto a = p * b * pinv;
    const auto s = tf::eigenvalues(a);
    ASSERT_EQ(s.eigenvalues.size(), 5u);
    EXPECT_NEAR(s.eigenvalues[0].real(), 0.9, 1e-12);
    EXPECT_NEAR(s.eigenvalues[1].real(), 0.5, 1e-12);
    EXPECT_NEAR(s.eigenvalues[1].imag(), 0.3, 1e-12);
    EXPECT_NEAR(s.eigenvalues[2].imag(), -0.3, 1e-12);
    EXPECT_NEAR(s.eigenvalues[3].real(), -0.2, 1e-12);
    EXPECT_NEAR(s.eigenvalues[3].imag(), 0.7, 1e-12);
    for (const auto& z : s.eigenvalues) {
        if (z.imag() == 0.0) continue;
        const bool has_partner = std::any_of(s.eigenvalues.begin(), s.eigenvalues.end(),
                                             [&](const auto& w) { return std::abs(w - std::conj(z)) < 1e-12; });
        EXPECT_TRUE(has_partner);
    }
}

TEST(Eigen, SumMatchesTrace) {
    const auto op = tf::build_truncation(40, tf::MapParams::make(0.45));
    const auto s = tf::eigenvalues(op);
    std::complex<double> sum = 0.0;
    for (const auto& z : s.eigenvalues) sum += z;
    EXPECT_NEAR(sum.real(), op.trace, 1e-8 * 40 * s.frobenius_norm);
    EXPECT_NEAR(sum.imag(), 0.0, 1e-12);
}

TEST(Eigen, DeterministicAcrossRuns) {
    const auto op = tf::build_truncation(30, tf::MapParams::make(0.8));
    const auto a = tf::eigenvalues(op);
    const auto b = tf::eigenvalues(op);
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
    EXPECT_EQ(a.residuals, b.residuals);
}

TEST(Eigen, CertifiedResidualsOnTruncation) {
    const auto op = tf::build_truncation(30, tf::MapParams::make(0.5));
    const auto s = tf::eigenvalues(op);
    ASSERT_EQ(s.eigenvalues.size(), 30u);
    EXPECT_NEAR(s.eigenvalues[0].real(), 1.0, 1e-8);
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
        EXPECT_LE(s.residuals[i], 1e-10 * s.frobenius_norm);
        EXPECT_NEAR(tf::residual(op, s.eigenvalues[i], s.eigenvectors[i]), s.residuals[i],
                    1e-13 * s.frobenius_norm);
    }
}

TEST(Eigen, TentTruncationHasPowersOfFour) {
    const auto op = tf::build_truncation(50, tf::MapParams::make(0.0));
    const auto s = tf::eigenvalues(op);
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(s.eigenvalues[static_cast<std::size_t>(k)].real(), std::pow(0.25, k), 1e-12);
}

TEST(Eigen, ExtendedPrecisionAgreesWithDouble) {
    const auto params = tf::MapParams::make(0.6);
    const auto lo = tf::eigenvalues(tf::build_truncation(20, params));
    const auto hi = tf::eigenvalues_extended(20, params, tf::EntryOptions{});
    EXPECT_EQ(hi.precision_bits >= 256, true);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(lo.eigenvalues[i].real(), hi.eigenvalues[i].real(), 1e-12);
}

TEST(Eigen, ResidualDetectsPerturbation) {
    const auto op = tf::build_truncation(12, tf::MapParams::make(0.3));
    const auto s = tf::eigenvalues(op);
    const auto lambda = s.eigenvalues[0];
    EXPECT_LT(tf::residual(op, lambda, s.eigenvectors[0]), 1e-12);
    EXPECT_GT(tf::residual(op, lambda + 1e-3, s.eigenvectors[0]), 0.9e-3);
}

TEST(Eigen, ResidualRejectsBadVectors) {
    const auto op = tf::build_truncation(4, tf::MapParams::make(0.3));
    const std::vector<std::complex<double>> short_v(3, 0.5);
    EXPECT_THROW(tf::residual(op, 1.0, short_v), tf::DomainError);
    const std::vector<std::complex<double>> zero(4, 0.0);
    EXPECT_THROW(tf::residual(op, 1.0, zero), tf::DomainError);
    const std::vector<std::complex<double>> big(4, 1.0);
    EXPECT_THROW(tf::residual(op, 1.0, big), tf::DomainError);
}

TEST(Eigen, RejectsEmptyOrRectangular) {
    EXPECT_THROW(tf::eigenvalues(tf::Matrix<double>(2, 3)), tf::DomainError);
    EXPECT_THROW(tf::eigenvalues(tf::Matrix<double>()), tf::DomainError);
}

TEST(Eigen, ExhaustedBudgetThrowsWithPartialSpectrum) {
    const auto op = tf::build_truncation(20, tf::MapParams::make(0.5));
    tf::EigenOptions opts;
    opts.sweeps_per_dimension = 0;
    EXPECT_THROW(tf::eigenvalues(op, opts), tf::ConvergenceError);
}
