#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rrhte/losses.hpp"

using namespace rrhte;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

TrialData scalar_trial(double t, double pi, double y, double x) {
    MatrixXd X(2, 1);
    X << x, -x;  // second row keeps the column centered
    MatrixXd Y(2, 1);
    Y << y, 0;
    VectorXd tv(2), pv(2);
    tv << t, -t;
    pv << pi, pi;
    return TrialData(X, Y, tv, pv);
}

}  // namespace

TEST_CASE("all-zero outcomes give zero loss") {
    MatrixXd Y = MatrixXd::Zero(3, 2);
    MatrixXd Theta = MatrixXd::Random(3, 2) * 5.0;
    CHECK(multiple_logistic_loss(Y, Theta, VectorXd::Ones(3)) == 0.0);
}

TEST_CASE("single active term at theta zero is log 2") {
    MatrixXd Y(1, 1), Theta(1, 1);
    Y << 1;
    Theta << 0;
    CHECK(multiple_logistic_loss(Y, Theta, VectorXd::Ones(1)) ==
          doctest::Approx(0.6931471805599453).epsilon(1e-15));
}

TEST_CASE("multiple_logistic_loss matches the double-loop oracle") {
    std::mt19937_64 eng(3);
    std::normal_distribution<double> normal(0.0, 2.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    MatrixXd Y(4, 3), Theta(4, 3);
    VectorXd w(4);
    for (int i = 0; i < 4; ++i) {
        w(i) = 0.5 + unif(eng);
        for (int j = 0; j < 3; ++j) {
            Y(i, j) = unif(eng) < 0.5 ? 1.0 : 0.0;
            Theta(i, j) = normal(eng);
        }
    }
    double expected = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j)
            if (Y(i, j) == 1.0) expected += w(i) * oracle::softplus(-Theta(i, j));
    CHECK(multiple_logistic_loss(Y, Theta, w) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("loss errors: shape mismatch and non-finite predictors") {
    MatrixXd Y = MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(multiple_logistic_loss(Y, MatrixXd::Zero(2, 3), VectorXd::Ones(2)),
                    DimensionError);
    CHECK_THROWS_AS(multiple_logistic_loss(Y, MatrixXd::Zero(2, 2), VectorXd::Ones(3)),
                    DimensionError);
    MatrixXd bad = MatrixXd::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(multiple_logistic_loss(Y, bad, VectorXd::Ones(2)), NumericError);
    CHECK_THROWS_AS(multiple_logistic_loss(Y, MatrixXd::Zero(2, 2), VectorXd::Zero(2)),
                    ValidationError);
}

TEST_CASE("loss_w scalar case: weight 2 times log 2") {
    // t=+1, pi=1/2, y=1 and zero predictor contributes a_i * log 2 = 2 log 2
    TrialData data = scalar_trial(1.0, 0.5, 1.0, 1.0);
    FactorizedCoefficients coeffs{MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1)};
    CHECK(loss_w(coeffs, data) == doctest::Approx(1.3862943611198906).epsilon(1e-15));
}

TEST_CASE("loss_w at pi = 1/2 is twice the unweighted signed loss") {
    TrialData data = oracle::random_trial(40, 3, 2, 21, /*rct=*/true);
    auto coeffs = oracle::random_coeffs(3, 2, 2, 22);
    MatrixXd theta = linear_predictors(data.X, coeffs, data.t);
    double unweighted = multiple_logistic_loss(data.Y, theta, VectorXd::Ones(40));
    CHECK(loss_w(coeffs, data) == doctest::Approx(2.0 * unweighted).epsilon(1e-14));
}

TEST_CASE("loss_w matches the display-formula scalar oracle") {
    TrialData data = oracle::random_trial(30, 4, 3, 31);
    auto coeffs = oracle::random_coeffs(4, 3, 2, 32);
    double expected = oracle::gamma_loss(oracle::Kind::W, coeffs.coefficient_matrix(), data.X,
                                         data.Y, data.t, data.pi);
    CHECK(loss_w(coeffs, data) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("loss_a scalar case") {
    // t=+1, pi=0.3, y=1, v'W'x=1: q=0.7, term log(1+exp(-0.7))
    TrialData data = scalar_trial(1.0, 0.3, 1.0, 1.0);
    FactorizedCoefficients coeffs{MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1)};
    double expected = std::log1p(std::exp(-0.7));  // = 0.4031860488854579
    CHECK(expected == doctest::Approx(0.4031860488854579).epsilon(1e-15));
    CHECK(loss_a(coeffs, data) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("loss_a with zero predictors counts log 2 per active outcome") {
    TrialData data = oracle::random_trial(25, 3, 4, 41);
    FactorizedCoefficients coeffs{MatrixXd::Zero(3, 2), MatrixXd::Identity(4, 2)};
    double k = data.Y.sum();
    CHECK(loss_a(coeffs, data) == doctest::Approx(k * 0.6931471805599453).epsilon(1e-13));
    TrialData zeros(data.X, MatrixXd::Zero(25, 4), data.t, data.pi);
    CHECK(loss_a(coeffs, zeros) == 0.0);
}

TEST_CASE("loss_a matches the display-formula scalar oracle") {
    TrialData data = oracle::random_trial(30, 4, 3, 51);
    auto coeffs = oracle::random_coeffs(4, 3, 3, 52);
    double expected = oracle::gamma_loss(oracle::Kind::A, coeffs.coefficient_matrix(), data.X,
                                         data.Y, data.t, data.pi);
    CHECK(loss_a(coeffs, data) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("gradients vanish when Y is zero") {
    TrialData data = oracle::random_trial(10, 3, 2, 61);
    TrialData zeros(data.X, MatrixXd::Zero(10, 2), data.t, data.pi);
    auto coeffs = oracle::random_coeffs(3, 2, 2, 62);
    for (auto kind : {LossKind::WMethod, LossKind::ALearner}) {
        LossGradient g = loss_gradient(kind, coeffs, zeros);
        CHECK(g.dW.cwiseAbs().maxCoeff() == 0.0);
        CHECK(g.dV.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("gradients match central finite differences on 20 seeded instances") {
    const double h = 1e-5;
    for (unsigned seed = 0; seed < 20; ++seed) {
        TrialData data = oracle::random_trial(15, 3, 2, 100 + seed);
        auto coeffs = oracle::random_coeffs(3, 2, 2, 200 + seed, 0.5);
        LossKind kind = seed % 2 == 0 ? LossKind::WMethod : LossKind::ALearner;
        auto loss = [&](const FactorizedCoefficients& c) {
            return kind == LossKind::WMethod ? loss_w(c, data) : loss_a(c, data);
        };
        LossGradient g = loss_gradient(kind, coeffs, data);
        double scale = std::max(1.0, g.dW.cwiseAbs().maxCoeff());
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 2; ++k) {
                auto up = coeffs, dn = coeffs;
                up.W(i, k) += h;
                dn.W(i, k) -= h;
                double fd = (loss(up) - loss(dn)) / (2 * h);
                CHECK(std::abs(g.dW(i, k) - fd) < 1e-5 * scale);
            }
        double vscale = std::max(1.0, g.dV.cwiseAbs().maxCoeff());
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                auto up = coeffs, dn = coeffs;
                up.V(j, k) += h;
                dn.V(j, k) -= h;
                double fd = (loss(up) - loss(dn)) / (2 * h);
                CHECK(std::abs(g.dV(j, k) - fd) < 1e-5 * vscale);
            }
    }
}

TEST_CASE("gradient at W = 0 matches the scalar oracle") {
    TrialData data = oracle::random_trial(12, 3, 2, 71);
    auto coeffs = oracle::random_coeffs(3, 2, 2, 72);
    coeffs.W.setZero();
    // all theta = 0, so dL/dTheta_ij = -w_i Y_ij / 2
    LossGradient g = loss_gradient(LossKind::WMethod, coeffs, data);
    VectorXd a = w_weights(data.t, data.pi);
    MatrixXd dtheta(12, 2);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 2; ++j) dtheta(i, j) = -a(i) * data.Y(i, j) / 2.0;
    MatrixXd expected_dw = MatrixXd::Zero(3, 2);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 2; ++j)
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < 2; ++k)
                    expected_dw(c, k) += dtheta(i, j) * data.t(i) * data.X(i, c) * coeffs.V(j, k);
    CHECK((g.dW - expected_dw).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("losses are nonnegative and vanish only with inactive outcomes") {
    for (unsigned seed = 0; seed < 10; ++seed) {
        TrialData data = oracle::random_trial(20, 3, 2, 300 + seed);
        auto coeffs = oracle::random_coeffs(3, 2, 2, 400 + seed);
        CHECK(loss_w(coeffs, data) >= 0.0);
        CHECK(loss_a(coeffs, data) >= 0.0);
        TrialData zeros(data.X, MatrixXd::Zero(20, 2), data.t, data.pi);
        CHECK(loss_w(coeffs, zeros) == 0.0);
        CHECK(loss_a(coeffs, zeros) == 0.0);
    }
}

TEST_CASE("raising an active predictor strictly lowers the loss") {
    std::mt19937_64 eng(81);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        MatrixXd Y(3, 3);
        MatrixXd Theta(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Y(i, j) = (i + j + trial) % 2;
                Theta(i, j) = normal(eng);
            }
        Y(1, 1) = 1.0;
        VectorXd w = VectorXd::Ones(3);
        double before = multiple_logistic_loss(Y, Theta, w);
        Theta(1, 1) += 0.3;
        CHECK(multiple_logistic_loss(Y, Theta, w) < before);
    }
}
