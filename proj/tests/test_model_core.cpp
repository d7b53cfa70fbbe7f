#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rrhte/trial_data.hpp"

using namespace rrhte;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("center_columns removes the mean") {
    MatrixXd x(2, 1);
    x << 1, 3;
    MatrixXd c = center_columns(x);
    CHECK(c(0, 0) == -1.0);
    CHECK(c(1, 0) == 1.0);
}

TEST_CASE("center_columns leaves zero-mean input unchanged") {
    MatrixXd x(2, 2);
    x << 1, -2, -1, 2;
    CHECK(center_columns(x) == x);
}

TEST_CASE("center_columns re-centers a random matrix to 1e-12") {
    std::mt19937_64 eng(11);
    std::normal_distribution<double> normal(3.0, 2.0);
    MatrixXd x(5, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) x(i, j) = normal(eng);
    MatrixXd c = center_columns(x);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(c.col(j).mean()) < 1e-12);
    CHECK(c.rows() == 5);
    CHECK(c.cols() == 3);
}

TEST_CASE("center_columns rejects fewer than two rows") {
    CHECK_THROWS_AS(center_columns(MatrixXd::Ones(1, 2)), DegenerateInputError);
}

TEST_CASE("centering is exactly idempotent") {
    std::mt19937_64 eng(17);
    std::normal_distribution<double> normal(1e6, 1.0);  // large offsets stress the fixpoint
    for (int trial = 0; trial < 20; ++trial) {
        MatrixXd x(7, 4);
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 4; ++j) x(i, j) = normal(eng);
        MatrixXd once = center_columns(x);
        MatrixXd twice = center_columns(once);
        CHECK((once.array() == twice.array()).all());
    }
}

TEST_CASE("w_weights forced values") {
    VectorXd t(1), pi(1);
    t << 1;
    pi << 0.5;
    CHECK(w_weights(t, pi)(0) == doctest::Approx(2.0).epsilon(1e-15));
    t << -1;
    pi << 0.25;
    CHECK(w_weights(t, pi)(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("w_weights matches the element-wise scalar loop") {
    VectorXd t(3), pi(3);
    t << 1, -1, 1;
    pi << 0.3, 0.6, 0.9;
    VectorXd a = w_weights(t, pi);
    for (int i = 0; i < 3; ++i) {
        double expected = 1.0 / (t(i) * pi(i) + (1.0 - t(i)) / 2.0);  // scalar-loop oracle
        CHECK(a(i) == doctest::Approx(expected).epsilon(1e-15));
        CHECK(a(i) > 1.0);
    }
}

TEST_CASE("w_weights rejects propensity at the boundary") {
    VectorXd t(1), pi(1);
    t << 1;
    pi << 0.0;
    CHECK_THROWS_AS(w_weights(t, pi), PositivityError);
    pi << 1.0;
    CHECK_THROWS_AS(w_weights(t, pi), PositivityError);
    CHECK_THROWS_AS(a_scalings(t, pi), PositivityError);
}

TEST_CASE("a_scalings forced values") {
    VectorXd t(2), pi(2);
    t << 1, -1;
    pi << 0.3, 0.3;
    VectorXd q = a_scalings(t, pi);
    CHECK(q(0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(q(1) == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("a_scalings at pi = 1/2 has magnitude 1/2") {
    VectorXd t(4), pi = VectorXd::Constant(4, 0.5);
    t << 1, -1, -1, 1;
    VectorXd q = a_scalings(t, pi);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(q(i)) == 0.5);
}

TEST_CASE("a and q satisfy the closed-form products") {
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    VectorXd t(50), pi(50);
    for (int i = 0; i < 50; ++i) {
        t(i) = i % 2 == 0 ? 1.0 : -1.0;
        pi(i) = unif(eng);
    }
    VectorXd a = w_weights(t, pi), q = a_scalings(t, pi);
    for (int i = 0; i < 50; ++i) {
        double expected = t(i) > 0 ? (1.0 - pi(i)) / pi(i) : -pi(i) / (1.0 - pi(i));
        CHECK(a(i) * q(i) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("treatment_from_binary maps 0/1 and rejects anything else") {
    VectorXd t01(3);
    t01 << 1, 0, 1;
    VectorXd t = treatment_from_binary(t01);
    CHECK(t(0) == 1.0);
    CHECK(t(1) == -1.0);
    t01 << 1, 2, 0;
    CHECK_THROWS_AS(treatment_from_binary(t01), ValidationError);
}

TEST_CASE("TrialData validates its invariants") {
    MatrixXd X = center_columns(MatrixXd::Random(6, 2));
    MatrixXd Y = (MatrixXd::Random(6, 2).array() > 0).cast<double>();
    VectorXd t = VectorXd::Ones(6);
    t(0) = -1;
    VectorXd pi = VectorXd::Constant(6, 0.5);
    CHECK_NOTHROW(TrialData(X, Y, t, pi));

    MatrixXd bad_y = Y;
    bad_y(0, 0) = 0.5;
    CHECK_THROWS_AS(TrialData(X, bad_y, t, pi), ValidationError);

    VectorXd bad_t = t;
    bad_t(1) = 0;
    CHECK_THROWS_AS(TrialData(X, Y, bad_t, pi), ValidationError);

    VectorXd bad_pi = pi;
    bad_pi(2) = 1.0;
    CHECK_THROWS_AS(TrialData(X, Y, t, bad_pi), PositivityError);

    MatrixXd uncentered = X;
    uncentered.col(0).array() += 1.0;
    CHECK_THROWS_AS(TrialData(uncentered, Y, t, pi), ValidationError);

    CHECK_THROWS_AS(TrialData(X, Y, t.head(5), pi), DimensionError);
}

TEST_CASE("constant propensity ignores the data") {
    PropensityModel model = estimate_propensity(MatrixXd::Random(8, 3), VectorXd::Ones(8),
                                                PropensitySpec::Constant(0.5));
    VectorXd pi = model.predict(MatrixXd::Random(8, 3));
    for (int i = 0; i < 8; ++i) CHECK(pi(i) == 0.5);

    PropensityModel other = estimate_propensity(MatrixXd::Random(8, 3), -VectorXd::Ones(8),
                                                PropensitySpec::Constant(0.5));
    CHECK(other.rate == model.rate);
    CHECK_THROWS_AS(estimate_propensity(MatrixXd::Random(2, 1), VectorXd::Ones(2),
                                        PropensitySpec::Constant(1.0)),
                    PositivityError);
}

TEST_CASE("empirical RCT propensity is the sample proportion") {
    VectorXd t(10);
    t << 1, 1, 1, 1, 1, 1, -1, -1, -1, -1;
    PropensityModel model =
        estimate_propensity(MatrixXd::Zero(10, 1), t, PropensitySpec::EmpiricalRct());
    CHECK(model.predict(MatrixXd::Zero(10, 1))(0) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("single-arm data cannot be estimated") {
    CHECK_THROWS_AS(estimate_propensity(MatrixXd::Random(5, 1), VectorXd::Ones(5),
                                        PropensitySpec::EmpiricalRct()),
                    EstimationError);
    CHECK_THROWS_AS(estimate_propensity(MatrixXd::Random(5, 1), -VectorXd::Ones(5),
                                        PropensitySpec::Logistic()),
                    EstimationError);
}

TEST_CASE("logistic propensity recovers the generating model") {
    // t ~ Bernoulli(1/(1+exp(1-x1))), i.e. intercept -1 and slope +1 on x1
    const int n = 5000;
    std::mt19937_64 eng(99);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    MatrixXd X(n, 2);
    VectorXd t(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = normal(eng);
        X(i, 1) = normal(eng);
        double prob = 1.0 / (1.0 + std::exp(1.0 - X(i, 0)));
        t(i) = unif(eng) < prob ? 1.0 : -1.0;
    }
    PropensityModel model = estimate_propensity(X, t, PropensitySpec::Logistic());
    REQUIRE(model.beta.size() == 3);
    CHECK(std::abs(model.beta(0) - (-1.0)) < 0.1);
    CHECK(std::abs(model.beta(1) - 1.0) < 0.1);
    CHECK(std::abs(model.beta(2)) < 0.1);
    VectorXd pi = model.predict(X);
    for (int i = 0; i < n; ++i) {
        CHECK(pi(i) >= kPropensityClamp);
        CHECK(pi(i) <= 1.0 - kPropensityClamp);
    }
}
