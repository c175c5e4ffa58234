#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "lvpp/error.hpp"
#include "lvpp/schedules.hpp"

using namespace lvpp;

TEST(Schedule, PaperDoubleExpSteps) {
    StepSchedule s = StepSchedule::parse("dexp:1.5,1.5");
    std::vector<double> a;
    for (int k = 1; k <= 12; ++k) a.push_back(s.next_alpha());
    EXPECT_DOUBLE_EQ(a[0], 1.0);
    EXPECT_DOUBLE_EQ(a[1], 1.0);
    EXPECT_NEAR(a[2], 1.49, 0.005);
    // printed as 2.43; the recursion gives 2.4392, which is what reproduces 5.35 next
    EXPECT_NEAR(a[3], 2.43, 0.01);
    EXPECT_NEAR(a[4], 5.35, 0.005);
    EXPECT_NEAR(a[5], 16.4, 0.05);
    EXPECT_NEAR(a[6], 85.0, 0.5);
    EXPECT_NEAR(a[7], 935.0, 5.0);
    EXPECT_NEAR(a[8], 3.17e4, 0.005e4);
    EXPECT_NEAR(a[9], 5.85e6, 0.005e6);
    EXPECT_DOUBLE_EQ(a[10], 1e10);
    EXPECT_DOUBLE_EQ(a[11], 1e10);
}

TEST(Schedule, ClosedFormSteps) {
    StepSchedule f = StepSchedule::parse("fixed:2.5");
    StepSchedule g = StepSchedule::parse("geo:3,2");
    StepSchedule ar = StepSchedule::parse("arith:2:1");
    StepSchedule fa = StepSchedule::parse("fact:1");
    for (int k = 1; k <= 8; ++k) {
        EXPECT_DOUBLE_EQ(f.next_alpha(), 2.5);
        EXPECT_DOUBLE_EQ(g.next_alpha(), 3.0 * std::pow(2.0, k - 1));
        EXPECT_DOUBLE_EQ(ar.next_alpha(), 2.0 * k * (k + 1));
        EXPECT_DOUBLE_EQ(fa.next_alpha(), k == 1 ? 1.0 : (k - 1) * std::tgamma(k));
    }
    EXPECT_EQ(g.iteration(), 8);
    g.reset();
    EXPECT_DOUBLE_EQ(g.next_alpha(), 3.0);
}

TEST(Schedule, ParseErrors) {
    EXPECT_THROW(StepSchedule::parse("geo"), ConfigError);
    EXPECT_THROW(StepSchedule::parse("spiral:1"), ConfigError);
    EXPECT_THROW(StepSchedule::parse("fixed:-1"), ConfigError);
    EXPECT_THROW(StepSchedule::parse("geo:1,0.5"), ConfigError);
    EXPECT_THROW(StepSchedule::parse("arith:1:0.5"), ConfigError);
    EXPECT_THROW(StepSchedule::parse("dexp:1.5"), ConfigError);
    EXPECT_THROW(StepSchedule::parse("fixed:1x"), ConfigError);
    EXPECT_THROW(StepSchedule::parse("fixed:1,2"), ConfigError);
}

TEST(Schedule, DescribeRoundTrip) {
    for (const char* t : {"fixed:1.5", "geo:1,1.1", "arith:25:0", "fact:2", "dexp:1.5,1.5", "dexpc:1.5,1.5,2"}) {
        StepSchedule a = StepSchedule::parse(t);
        StepSchedule b = StepSchedule::parse(a.describe());
        for (int k = 0; k < 6; ++k) EXPECT_DOUBLE_EQ(a.next_alpha(), b.next_alpha()) << t;
    }
}

TEST(ErrorRatio, Examples) {
    EXPECT_NEAR(theoretical_error_ratio(schedule::Geometric{1.0, 2.0}, 1), 1.0 / 3.0, 1e-12);
    for (int k = 1; k <= 60; ++k)
        EXPECT_NEAR(theoretical_error_ratio(schedule::DoubleExp{1.5, 1.5}, k), 1.5, 1e-12) << k;
    for (int k : {1, 10, 100, 10000})
        EXPECT_NEAR(theoretical_error_ratio(schedule::Arithmetic{1.0, 0}, k), double(k) / (k + 2), 1e-12);
    EXPECT_NEAR(theoretical_error_ratio(schedule::Arithmetic{1.0, 0}, 1000000), 1.0, 1e-5);
    EXPECT_THROW(theoretical_error_ratio(schedule::PaperDoubleExp{}, 3), ConfigError);
    EXPECT_THROW(theoretical_error_ratio(schedule::Fixed{}, 0), ConfigError);
}

// eps_k = 1 / S_k, so eps_(k+1)/eps_k = S_k / S_(k+1) for the linear-type rules.
TEST(ErrorRatio, MatchesPartialSums) {
    const std::vector<ScheduleSpec> specs = {schedule::Fixed{0.7}, schedule::Arithmetic{2.0, 0},
                                             schedule::Arithmetic{1.0, 2}, schedule::Geometric{1.0, 1.1},
                                             schedule::Geometric{5.0, 3.0}, schedule::Factorial{1.0}};
    for (const auto& spec : specs) {
        for (int k = 1; k <= 15; ++k) {
            const double r = partial_sum(spec, k) / partial_sum(spec, k + 1);
            EXPECT_NEAR(theoretical_error_ratio(spec, k), r, 1e-12) << k;
        }
    }
    const schedule::DoubleExp d{1.5, 1.5, 2.0};
    for (int k = 1; k <= 8; ++k) {
        const double r = std::pow(partial_sum(d, k), d.q) / partial_sum(d, k + 1);
        EXPECT_NEAR(theoretical_error_ratio(d, k), r, 1e-12 * r);
    }
}

TEST(PartialSum, MatchesRunningSums) {
    const std::vector<ScheduleSpec> specs = {schedule::Fixed{0.7}, schedule::Arithmetic{2.0, 0},
                                             schedule::Arithmetic{1.0, 3}, schedule::Geometric{1.0, 1.1},
                                             schedule::Factorial{3.0}};
    for (const auto& spec : specs) {
        StepSchedule s(spec);
        double sum = 0.0;
        for (int k = 1; k <= 15; ++k) {
            sum += s.next_alpha();
            EXPECT_NEAR(partial_sum(spec, k), sum, 1e-12 * sum) << s.describe() << " k=" << k;
        }
    }
}

TEST(PartialSum, FactorialIdentityInIntegers) {
    // sum_{j<k} j j! = k! - 1, so alpha_1 + ... + alpha_k = C k!
    std::uint64_t fact = 1, sum = 1; // alpha_1 with C = 1
    for (std::uint64_t k = 2; k <= 12; ++k) {
        fact *= (k - 1);                 // (k-1)!
        sum += (k - 1) * fact;           // alpha_k = (k-1)(k-1)!
        EXPECT_EQ(sum, fact * k) << k;   // k!
        EXPECT_DOUBLE_EQ(partial_sum(schedule::Factorial{1.0}, static_cast<int>(k)), static_cast<double>(fact * k));
    }
}

TEST(PartialSum, DoubleExpTelescopes) {
    const schedule::DoubleExp d{1.5, 1.5, 0.0, 1e300};
    StepSchedule s(d);
    double sum = 0.0;
    for (int k = 1; k <= 10; ++k) {
        sum += s.next_alpha();
        const double closed = std::pow(1.5, 1.0 / 0.5) * std::pow(1.5, std::pow(1.5, k - 1));
        EXPECT_NEAR(sum, closed, 1e-10 * closed) << k;
    }
}

TEST(PartialSum, Unsummable) {
    const std::vector<ScheduleSpec> specs = {schedule::Arithmetic{1e-3, 0}, schedule::Geometric{1e-3, 1.01},
                                             schedule::Factorial{1e-3}, schedule::DoubleExp{1.5, 1.5},
                                             schedule::PaperDoubleExp{1.5, 1.5}};
    for (const auto& spec : specs) {
        StepSchedule s(spec);
        double sum = 0.0, at10 = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double a = s.next_alpha();
            EXPECT_GT(a, 0.0);
            sum += a;
            if (k == 10) at10 = sum;
        }
        EXPECT_GT(sum, 2.0 * at10) << s.describe();
    }
}

TEST(ClassifyOrder, Examples) {
    const std::vector<double> ones = {1.0005, 0.9995, 1.001, 0.999, 1.0, 1.0002};
    EXPECT_EQ(classify_order(ones).kind, OrderClass::Kind::Sublinear);

    std::vector<double> half;
    for (int k = 1; k <= 10; ++k) half.push_back(0.5 + 0.5 / (k * k));
    const auto lin = classify_order(half);
    EXPECT_EQ(lin.kind, OrderClass::Kind::Linear);
    EXPECT_NEAR(lin.rate, 0.5, 0.02);

    std::vector<double> sup;
    for (int k = 1; k <= 8; ++k) sup.push_back(theoretical_error_ratio(schedule::DoubleExp{1.5, 1.5}, k));
    const auto s = classify_order(sup, 1.5);
    EXPECT_EQ(s.kind, OrderClass::Kind::Superlinear);
    EXPECT_DOUBLE_EQ(s.order, 1.5);
    EXPECT_NEAR(s.rate, 1.5, 1e-12);

    EXPECT_THROW(classify_order(std::vector<double>{1.0, 1.0}), ConfigError);
}
