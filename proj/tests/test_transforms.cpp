#include "helpers.hpp"

#include "tsintel/transforms.hpp"

#include <gtest/gtest.h>

using namespace tsi;
using tsi::testing::uni;

namespace {

std::vector<double> vals(const TimeSeries &ts, std::size_t i = 0) {
	const auto v = ts.univariate(i).values();
	return {v.begin(), v.end()};
}

} // namespace

TEST(Transforms, EmptyChainIsIdentity) {
	TransformChain c;
	const auto x = uni({3, 1, 4});
	EXPECT_EQ(c.fit_apply(x), x);
	EXPECT_EQ(c.invert(x), x);
}

TEST(Transforms, NormalizeHand) {
	auto t = Transform::normalize();
	const auto y = vals(t.fit_apply(uni({1, 2, 3})));
	EXPECT_DOUBLE_EQ(y[0], -1.0);
	EXPECT_DOUBLE_EQ(y[1], 0.0);
	EXPECT_DOUBLE_EQ(y[2], 1.0);
	EXPECT_DOUBLE_EQ(t.mean(0), 2.0);
	EXPECT_DOUBLE_EQ(t.stddev(0), 1.0);
}

TEST(Transforms, NormalizeConstantUsesUnitSigma) {
	auto t = Transform::normalize();
	const auto x = uni({5, 5, 5});
	const auto y = t.fit_apply(x);
	EXPECT_TRUE(t.sigma_defaulted(0));
	EXPECT_EQ(vals(y), (std::vector<double>{0, 0, 0}));
	EXPECT_EQ(t.invert(y), x);
}

TEST(Transforms, DifferenceHand) {
	auto t = Transform::difference(1);
	const auto y = t.fit_apply(uni({5, 7, 4}));
	EXPECT_EQ(vals(y), (std::vector<double>{2, -3}));
	EXPECT_EQ(y.univariate(0).stamp(0), 3600);
	EXPECT_EQ(vals(t.invert(y)), (std::vector<double>{5, 7, 4}));
}

TEST(Transforms, SecondOrderDifference) {
	auto t = Transform::difference(2);
	const auto y = t.fit_apply(uni({1, 4, 9, 16, 25}));
	EXPECT_EQ(vals(y), (std::vector<double>{2, 2, 2}));
	EXPECT_EQ(vals(t.invert(y)), (std::vector<double>{1, 4, 9, 16, 25}));
}

TEST(Transforms, NormalizeThenDifferenceHand) {
	// x = {2, 4, 8, 10}: mean 6, sample sd sqrt(40/3)
	TransformChain c({Transform::normalize(), Transform::difference(1)});
	const auto y = vals(c.fit_apply(uni({2, 4, 8, 10})));
	const double sd = std::sqrt(40.0 / 3.0);
	ASSERT_EQ(y.size(), 3u);
	EXPECT_NEAR(y[0], 2.0 / sd, 1e-15);
	EXPECT_NEAR(y[1], 4.0 / sd, 1e-15);
	EXPECT_NEAR(y[2], 2.0 / sd, 1e-15);
	const auto back = vals(c.invert(c.fit_apply(uni({2, 4, 8, 10}))));
	for (std::size_t i = 0; i < 4; ++i) {
		EXPECT_NEAR(back[i], (std::vector<double>{2, 4, 8, 10})[i], 1e-12);
	}
}

TEST(Transforms, NonInvertibleKindsFlagged) {
	TransformChain c({Transform::normalize(), Transform::moving_average(3)});
	EXPECT_FALSE(c.invertible());
	const auto y = c.fit_apply(uni({1, 2, 3, 4}));
	EXPECT_THROW(c.invert(y), InvertibilityError);
	auto r = Transform::resample(7200);
	r.fit_apply(uni({1, 2, 3, 4}));
	EXPECT_THROW(r.invert(uni({1.0})), InvertibilityError);
}

TEST(Transforms, MovingAverageIsTrailing) {
	auto t = Transform::moving_average(2);
	EXPECT_EQ(vals(t.fit_apply(uni({2, 4, 6, 8}))), (std::vector<double>{2, 3, 5, 7}));
}

TEST(Transforms, InverseRunsInReverseOrder) {
	// difference then normalize: inverting in fit order would not reproduce x
	TransformChain c({Transform::difference(1), Transform::normalize()});
	const auto x = uni({1, 3, 2, 8, 5, 13});
	const auto back = vals(c.invert(c.fit_apply(x)));
	for (std::size_t i = 0; i < 6; ++i) {
		EXPECT_NEAR(back[i], vals(x)[i], 1e-12);
	}
}

TEST(Transforms, ContinuationInverse) {
	TransformChain c({Transform::difference(1)});
	c.fit_apply(uni({1, 2, 4}));
	const std::vector<double> tail{4};
	const std::vector<double> steps{1, 1};
	EXPECT_EQ(c.at(0).invert_continuation(0, steps, tail), (std::vector<double>{5, 6}));
}

TEST(Transforms, UnknownKindRejected) {
	EXPECT_THROW(transform_kind_from_string("boxcox"), ConfigError);
	EXPECT_THROW(Transform::difference(0), InvalidArgument);
}
