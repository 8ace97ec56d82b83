#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "compacta/standardization.hpp"
#include "testutil.hpp"

using namespace compacta;

TEST_CASE("fit_classic computes population moments") {
    const std::vector<double> data = {1.0, 2.0, 3.0};
    const ClassicMoments m = fit_classic(data);
    CHECK(m.mean == 2.0);
    CHECK(m.variance == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    const std::vector<double> constant = {4.25, 4.25, 4.25};
    CHECK(fit_classic(constant).mean == 4.25);
    CHECK(fit_classic(constant).variance == 0.0);

    CHECK(fit_classic(std::vector<double>{0.0}).mean == 0.0);
    CHECK(fit_classic(std::vector<double>{0.0}).variance == 0.0);

    CHECK_THROWS_AS(fit_classic(std::vector<double>{}), numeric_error);
    CHECK_THROWS_AS(fit_classic(std::vector<double>{1.0, std::nan("")}), numeric_error);
}

TEST_CASE("estimate_mode with exact matching") {
    const ModeEstimate a = estimate_mode(std::vector<double>{2.0, 2.0, 2.0, 5.0}, std::nullopt);
    CHECK(a.mode_value == 2.0);
    CHECK(a.mode_prob == 0.75);

    // tie between 1 and 2: smallest value wins
    const ModeEstimate b =
        estimate_mode(std::vector<double>{1.0, 1.0, 2.0, 2.0, 3.0}, std::nullopt);
    CHECK(b.mode_value == 1.0);
    CHECK(b.mode_prob == doctest::Approx(0.4).epsilon(1e-15));

    const ModeEstimate c = estimate_mode(std::vector<double>{7.0}, std::nullopt);
    CHECK(c.mode_value == 7.0);
    CHECK(c.mode_prob == 1.0);

    CHECK_THROWS_AS(estimate_mode(std::vector<double>{}, std::nullopt), numeric_error);
}

TEST_CASE("estimate_mode with binning") {
    // bins of width 0.2: {0.1, 0.15} share bin 0, 0.22 is in bin 1, 0.81 in bin 4
    const std::vector<double> data = {0.1, 0.15, 0.22, 0.81};
    const ModeEstimate m = estimate_mode(data, 0.2);
    CHECK(m.mode_value == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(m.mode_prob == 0.5);

    // bin tie: the lower bin wins, and its member mean is reported
    const ModeEstimate tie = estimate_mode(std::vector<double>{0.1, 0.3}, 0.2);
    CHECK(tie.mode_value == 0.1);
    CHECK(tie.mode_prob == 0.5);

    // negative values land in negative bins
    const ModeEstimate neg = estimate_mode(std::vector<double>{-0.3, -0.25, 0.5}, 0.2);
    CHECK(neg.mode_value == doctest::Approx(-0.275).epsilon(1e-12));

    CHECK_THROWS_AS(estimate_mode(data, 0.0), numeric_error);
    CHECK_THROWS_AS(estimate_mode(data, -1.0), numeric_error);
}

TEST_CASE("revised_mode picks the mode only above the probability threshold") {
    const std::vector<double> repeated = {2.0, 2.0, 2.0, 5.0};
    CHECK(revised_mode(repeated, 0.5, std::nullopt) == 2.0); // p-hat 0.75 >= 0.5

    const std::vector<double> spread = {1.0, 2.0, 3.0, 4.0};
    CHECK(revised_mode(spread, 0.5, std::nullopt) == 2.5); // p-hat 0.25 < 0.5 -> mean

    CHECK_THROWS_AS(revised_mode(repeated, 1.5, std::nullopt), numeric_error);
    CHECK_THROWS_AS(revised_mode(repeated, -0.1, std::nullopt), numeric_error);
}

TEST_CASE("revised_mode with eta zero always returns the mode") {
    std::mt19937_64 rng(31007);
    for (int iter = 0; iter < 50; ++iter) {
        const auto data = testutil::random_dataset(rng);
        const ModeEstimate m = estimate_mode(data, std::nullopt);
        CHECK(revised_mode(data, 0.0, std::nullopt) == m.mode_value);
    }
}

TEST_CASE("fit_mode_variance matches the hand-computed values") {
    CHECK(fit_mode_variance(std::vector<double>{2.0, 2.0, 2.0, 5.0}, 2.0) == 2.25);

    // phi equal to the mean reduces to the classic variance
    const std::vector<double> spread = {1.0, 2.0, 3.0, 4.0};
    CHECK(fit_mode_variance(spread, 2.5) == 1.25);
    CHECK(fit_classic(spread).variance == 1.25);

    CHECK(fit_mode_variance(std::vector<double>(6, 3.5), 3.5) == 0.0);
    CHECK_THROWS_AS(fit_mode_variance(std::vector<double>{}, 0.0), numeric_error);
}

TEST_CASE("fit_mode_variance never returns a negative value") {
    // the raw-moment expansion cancels catastrophically at large magnitudes;
    // small negatives are clamped to zero, gross ones trip the guard
    const std::vector<double> big = {1e8, 1e8 + 1};
    try {
        CHECK(fit_mode_variance(big, 1e8 + 0.5) >= 0.0);
    } catch (const numeric_error&) {
        // the guard firing is an acceptable outcome at this magnitude
    }

    std::mt19937_64 rng(5150);
    for (int iter = 0; iter < 100; ++iter) {
        const auto data = testutil::random_dataset(rng);
        const double phi = revised_mode(data, 0.5, std::nullopt);
        CHECK(fit_mode_variance(data, phi) >= 0.0);
    }
}

TEST_CASE("standardize_classic matches the hand-computed values") {
    const std::vector<double> data = {1.0, 2.0, 3.0};
    StandardizationModel model = fit_model(data, 1.0, std::nullopt, ScaleConvention::standard_error);
    // p-hat = 1/3 < eta = 1 -> phi = mean, var_mode = var_classic
    CHECK(standardize_classic(2.0, model) == 0.0);
    CHECK(standardize_classic(3.0, model) ==
          doctest::Approx(std::sqrt(4.5)).epsilon(1e-15)); // 1 * sqrt(3)/sqrt(2/3)

    model.scale_convention = ScaleConvention::standard_deviation;
    CHECK(standardize_classic(2.0, model) == 0.0);
    CHECK(standardize_classic(3.0, model) ==
          doctest::Approx(1.0 / std::sqrt(2.0 / 3.0)).epsilon(1e-15));

    StandardizationModel degenerate =
        fit_model(std::vector<double>{5.0, 5.0}, 0.5, std::nullopt, ScaleConvention::standard_error);
    CHECK_THROWS_AS(standardize_classic(5.0, degenerate), numeric_error);
    CHECK_THROWS_AS(standardize_mode(5.0, degenerate), numeric_error);
}

TEST_CASE("standardize_mode matches the hand-computed values") {
    const std::vector<double> data = {2.0, 2.0, 2.0, 5.0};
    const StandardizationModel model =
        fit_model(data, 0.5, std::nullopt, ScaleConvention::standard_error);
    CHECK(model.phi == 2.0);
    CHECK(model.var_mode == 2.25);
    CHECK(standardize_mode(2.0, model) == 0.0);
    // sigma-hat = 1.5, sqrt(n) = 2 -> w = 3 / (1.5/2) = 4
    CHECK(standardize_mode(5.0, model) == 4.0);
}

TEST_CASE("mode standardization reduces to classic when the mode misses eta") {
    std::mt19937_64 rng(90210);
    int tested = 0;
    while (tested < 200) {
        const auto data = testutil::random_dataset(rng);
        if (testutil::all_equal(data)) continue;
        const ModeEstimate mode = estimate_mode(data, std::nullopt);
        const double eta = mode.mode_prob + (1.0 - mode.mode_prob) / 2.0;
        if (!(eta > mode.mode_prob)) continue;
        for (const ScaleConvention sc :
             {ScaleConvention::standard_error, ScaleConvention::standard_deviation}) {
            const StandardizationModel model = fit_model(data, eta, std::nullopt, sc);
            REQUIRE(model.phi == model.mean);
            REQUIRE(model.var_mode == model.var_classic);
            for (double x : data)
                REQUIRE(standardize_mode(x, model) == standardize_classic(x, model));
        }
        ++tested;
    }
}

TEST_CASE("model invariants hold on random datasets") {
    std::mt19937_64 rng(48151);
    std::uniform_real_distribution<double> eta_dist(0.0, 1.0);
    for (int iter = 0; iter < 500; ++iter) {
        const auto data = testutil::random_dataset(rng);
        const double eta = eta_dist(rng);
        const StandardizationModel m = fit_model(data, eta, std::nullopt,
                                                 ScaleConvention::standard_error);

        // raw-moment expansion agrees with the fitted var_mode
        REQUIRE(std::abs(m.var_mode - fit_mode_variance(data, m.phi)) <= 1e-12);

        // moment identity and dominance
        const double shift = m.mean - m.phi;
        REQUIRE(std::abs(m.var_mode - (m.var_classic + shift * shift)) <= 1e-12);
        REQUIRE(m.var_mode >= m.var_classic);
        if (m.phi == m.mean) REQUIRE(m.var_mode == m.var_classic);

        // indicator structure
        if (m.mode.mode_prob < eta) REQUIRE(m.phi == m.mean);
        else REQUIRE(m.phi == m.mode.mode_value);
    }
}

TEST_CASE("revised mode is shift-equivariant under exact matching") {
    std::mt19937_64 rng(615243);
    std::uniform_int_distribution<int> grid(-20, 20);
    std::uniform_int_distribution<int> shift_grid(-20, 20);
    std::uniform_int_distribution<std::size_t> size(2, 60);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> data(size(rng));
        for (auto& v : data) v = static_cast<double>(grid(rng)) / 2.0;
        const double c = static_cast<double>(shift_grid(rng)) / 2.0;
        std::vector<double> shifted(data);
        for (auto& v : shifted) v += c;

        // mode branch: exact for dyadic grids
        REQUIRE(revised_mode(shifted, 0.0, std::nullopt) ==
                revised_mode(data, 0.0, std::nullopt) + c);
        // mean branch: division by n may round differently, allow 1e-12
        REQUIRE(std::abs(revised_mode(shifted, 1.0, std::nullopt) -
                         (revised_mode(data, 1.0, std::nullopt) + c)) <= 1e-12);
    }
}

TEST_CASE("phi is monotone in eta: mode can only yield to the mean") {
    std::mt19937_64 rng(7465);
    for (int iter = 0; iter < 100; ++iter) {
        const auto data = testutil::random_dataset(rng);
        const ClassicMoments cm = fit_classic(data);
        const ModeEstimate mode = estimate_mode(data, std::nullopt);
        bool switched = false;
        for (int step = 0; step <= 20; ++step) {
            const double eta = static_cast<double>(step) / 20.0;
            const double phi = revised_mode(data, eta, std::nullopt);
            if (!switched) {
                if (phi != mode.mode_value) {
                    switched = true;
                    REQUIRE(phi == cm.mean);
                }
            } else {
                REQUIRE(phi == cm.mean);
            }
        }
    }
}

TEST_CASE("standardization inverts to the original value") {
    std::mt19937_64 rng(112233);
    std::uniform_real_distribution<double> eta_dist(0.0, 1.0);
    for (int iter = 0; iter < 200; ++iter) {
        const auto data = testutil::random_dataset(rng);
        if (testutil::all_equal(data)) continue;
        for (const ScaleConvention sc :
             {ScaleConvention::standard_error, ScaleConvention::standard_deviation}) {
            const StandardizationModel m = fit_model(data, eta_dist(rng), std::nullopt, sc);
            if (!(m.var_mode > 0.0)) continue;
            const double sigma = std::sqrt(m.var_mode);
            const double scale = sc == ScaleConvention::standard_error
                                     ? sigma / std::sqrt(static_cast<double>(m.n))
                                     : sigma;
            for (double x : data) {
                const double w = standardize_mode(x, m);
                REQUIRE(std::abs(w * scale + m.phi - x) <= 1e-12);
            }
        }
    }
}

TEST_CASE("freedman_diaconis_width") {
    // 1..8: IQR = 3.5 with interpolated quartiles, n^(-1/3) = 1/2
    const std::vector<double> ramp = {1, 2, 3, 4, 5, 6, 7, 8};
    const auto w = freedman_diaconis_width(ramp);
    REQUIRE(w.has_value());
    CHECK(*w == doctest::Approx(3.5).epsilon(1e-12));

    // zero IQR falls back to range/sqrt(n)
    const std::vector<double> spiky = {5, 5, 5, 5, 9};
    const auto w2 = freedman_diaconis_width(spiky);
    REQUIRE(w2.has_value());
    CHECK(*w2 == doctest::Approx(4.0 / std::sqrt(5.0)).epsilon(1e-12));

    // constant and singleton data admit no width
    CHECK_FALSE(freedman_diaconis_width(std::vector<double>{3, 3, 3}).has_value());
    CHECK_FALSE(freedman_diaconis_width(std::vector<double>{3}).has_value());
    CHECK_THROWS_AS(freedman_diaconis_width(std::vector<double>{}), numeric_error);
}

TEST_CASE("binned model fitting keeps the invariants") {
    std::mt19937_64 rng(30992);
    for (int iter = 0; iter < 100; ++iter) {
        const auto data = testutil::random_dataset(rng);
        const auto width = freedman_diaconis_width(data);
        const StandardizationModel m =
            fit_model(data, 0.5, width, ScaleConvention::standard_deviation);
        const double shift = m.mean - m.phi;
        REQUIRE(std::abs(m.var_mode - (m.var_classic + shift * shift)) <= 1e-12);
        REQUIRE(m.var_mode >= m.var_classic);
        REQUIRE(m.mode.mode_prob >= 0.0);
        REQUIRE(m.mode.mode_prob <= 1.0);
    }
}
