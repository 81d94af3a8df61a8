#include <doctest.h>

#include <cmath>

#include "garchvi/errors.hpp"
#include "garchvi/models.hpp"
#include "garchvi/transforms.hpp"

using namespace garchvi;

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

ReturnSeries series_of(const std::vector<double>& returns) {
    std::vector<Date> dates;
    Date day{2018, 1, 2};
    for (std::size_t i = 0; i < returns.size(); ++i) {
        dates.push_back(day);
        day = day.plus_days(1);
    }
    return ReturnSeries(std::move(dates), returns);
}

ConstrainedParams garch11(double omega, double alpha, double beta) {
    ConstrainedParams nu;
    nu.omega = omega;
    nu.alpha = {alpha};
    nu.beta = {beta};
    return nu;
}

}  // namespace

TEST_CASE("figarch weight recursion") {
    SUBCASE("hand-checked values") {
        const auto w1 = figarch_weights(0.125, 0.3125, 0.5, 1);
        REQUIRE(w1.size() == 1);
        CHECK(w1[0] == doctest::Approx(0.3125).epsilon(1e-13));
        const auto w2 = figarch_weights(0.125, 0.3125, 0.5, 2);
        CHECK(w2[0] == doctest::Approx(0.3125).epsilon(1e-13));
        CHECK(w2[1] == doctest::Approx(0.16015625).epsilon(1e-13));
    }
    SUBCASE("all-zero inputs") {
        for (double w : figarch_weights(0.0, 0.0, 0.0, 3)) CHECK(w == 0.0);
    }
    SUBCASE("nonnegative under the constraint set") {
        Rng rng(5);
        for (int rep = 0; rep < 1000; ++rep) {
            const double d = rng.uniform();
            const double phi = rng.uniform() * 0.5 * (1.0 - d);
            const double beta = rng.uniform() * (d + phi);
            for (double w : figarch_weights(phi, beta, d, 200)) {
                REQUIRE(w >= 0.0);
            }
        }
    }
    SUBCASE("constraint violations rejected") {
        CHECK_THROWS_AS(figarch_weights(0.6, 0.1, 0.5, 4), ConstraintViolation);  // phi > (1-d)/2
        CHECK_THROWS_AS(figarch_weights(0.1, 0.9, 0.5, 4), ConstraintViolation);  // beta > d+phi
        CHECK_THROWS_AS(figarch_weights(0.1, 0.1, 1.5, 4), ConstraintViolation);
    }
}

TEST_CASE("variance recursion examples") {
    SUBCASE("garch(1,1) pins the first value to the back-cast") {
        ModelSpec spec = parse_model("garch(1,1)");
        const auto h = variance_recursion(spec, garch11(0.1, 0.2, 0.7), {1.0, 2.0}, 2.5);
        REQUIRE(h.size() == 2);
        CHECK(h[0] == 2.5);
        CHECK(h[1] == doctest::Approx(0.1 + 0.2 * 1.0 + 0.7 * 2.5).epsilon(1e-15));
    }
    SUBCASE("arch(1) with alpha=0 collapses to omega") {
        ModelSpec spec = parse_model("arch(1)");
        ConstrainedParams nu;
        nu.omega = 1.0;
        nu.alpha = {0.0};
        const auto h = variance_recursion(spec, nu, {0.4, -1.0, 2.0, 0.1}, 7.7);
        CHECK(h[0] == 7.7);
        for (std::size_t t = 1; t < h.size(); ++t) CHECK(h[t] == 1.0);
    }
    SUBCASE("egarch with all-zero parameters gives h = 1 everywhere") {
        ModelSpec spec = parse_model("egarch(1,1)");
        ConstrainedParams nu;
        nu.omega = 0.0;
        nu.alpha = {0.0};
        nu.psi = {0.0};
        nu.beta = {0.0};
        const auto h = variance_recursion(spec, nu, {0.4, -1.0, 2.0}, 3.3);
        for (double v : h) CHECK(v == 1.0);
    }
    SUBCASE("gjr indicator only fires on positive shocks") {
        ModelSpec spec = parse_model("gjr-garch(1,1,1)");
        ConstrainedParams nu;
        nu.omega = 0.1;
        nu.alpha = {0.1};
        nu.gamma = {0.4};
        nu.beta = {0.0};
        const auto h = variance_recursion(spec, nu, {1.0, -1.0, 1.0}, 1.0);
        CHECK(h[1] == doctest::Approx(0.1 + 0.1 + 0.4).epsilon(1e-15));  // positive shock
        CHECK(h[2] == doctest::Approx(0.1 + 0.1).epsilon(1e-15));        // negative shock
    }
}

TEST_CASE("qml objective") {
    SUBCASE("forced unit variance") {
        ModelSpec spec = parse_model("arch(1)");
        ConstrainedParams nu;
        nu.omega = 1.0;
        nu.alpha = {0.0};
        CHECK(qml_objective(spec, nu, {0.0, 1.0}, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(qml_objective(spec, nu, {0.0, 0.0}, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("garch(1,1) hand evaluation") {
        ModelSpec spec = parse_model("garch(1,1)");
        const double expected =
            (std::log(2.5) + 1.0 / 2.5) + (std::log(2.05) + 4.0 / 2.05);
        CHECK(qml_objective(spec, garch11(0.1, 0.2, 0.7), {1.0, 2.0}, 2.5) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("log likelihood") {
    ModelSpec spec = parse_model("arch(1)");
    ConstrainedParams nu;
    nu.omega = 1.0;
    nu.alpha = {0.0};
    SUBCASE("unit variance, zero returns") {
        CHECK(log_likelihood(spec, nu, {0.0}, 1.0) ==
              doctest::Approx(-0.9189385332046727).epsilon(1e-13));
        CHECK(log_likelihood(spec, nu, {0.0, 0.0}, 1.0) ==
              doctest::Approx(-1.8378770664093453).epsilon(1e-13));
    }
    SUBCASE("gaussian identity across families") {
        Rng rng(17);
        for (const char* name : {"arch(1)", "garch(1,1)", "gjr-garch(1,1,1)", "egarch(1,1)",
                                 "gjr-egarch(1,1,1)", "figarch(1,d,1)"}) {
            ModelSpec m = parse_model(name);
            m.figarch_truncation = 50;
            const TransformSpec tspec(m);
            for (int rep = 0; rep < 20; ++rep) {
                Eigen::VectorXd theta(tspec.dim());
                for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-2.0, 2.0);
                const auto nu_rep = inverse_transform(tspec, theta);
                std::vector<double> r(50);
                for (auto& v : r) v = rng.normal() * 1.3;
                const double h0 = backcast_variance(r);
                const double ll = log_likelihood(m, nu_rep, r, h0);
                const double expected =
                    -0.5 * (static_cast<double>(r.size()) * kLog2Pi +
                            qml_objective(m, nu_rep, r, h0));
                INFO("family ", name);
                CHECK(ll == doctest::Approx(expected).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("variance path carries per-observation likelihoods") {
    ModelSpec spec = parse_model("garch(1,1)");
    const auto s = series_of({1.0, 2.0});
    const auto path = variance_path(spec, garch11(0.1, 0.2, 0.7), s, 2.5);
    REQUIRE(path.h.size() == 2);
    REQUIRE(path.loglik_per_obs.size() == 2);
    double total = 0.0;
    for (double v : path.loglik_per_obs) total += v;
    CHECK(total == doctest::Approx(log_likelihood(spec, garch11(0.1, 0.2, 0.7),
                                                  s.returns(), 2.5)).epsilon(1e-12));
}

TEST_CASE("positivity invariants") {
    Rng rng(23);
    SUBCASE("linear families: h >= omega") {
        for (const char* name : {"arch(2)", "garch(1,1)", "gjr-garch(1,1,1)"}) {
            ModelSpec m = parse_model(name);
            const TransformSpec tspec(m);
            for (int rep = 0; rep < 50; ++rep) {
                Eigen::VectorXd theta(tspec.dim());
                for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = rng.uniform(-4.0, 4.0);
                const auto nu = inverse_transform(tspec, theta);
                std::vector<double> r(30);
                for (auto& v : r) v = rng.normal();
                for (double h : variance_recursion(m, nu, r, backcast_variance(r)))
                    CHECK(h >= std::min(nu.omega, backcast_variance(r)) - 1e-15);
            }
        }
    }
    SUBCASE("egarch stays positive for arbitrary parameters") {
        ModelSpec m = parse_model("egarch(1,1)");
        for (int rep = 0; rep < 50; ++rep) {
            ConstrainedParams nu;
            nu.omega = rng.uniform(-5.0, 5.0);
            nu.alpha = {rng.uniform(-3.0, 3.0)};
            nu.psi = {rng.uniform(-3.0, 3.0)};
            nu.beta = {rng.uniform(-2.0, 2.0)};
            std::vector<double> r(40);
            for (auto& v : r) v = rng.normal();
            for (double h : variance_recursion(m, nu, r, 1.0)) {
                CHECK(h > 0.0);
                CHECK(std::isfinite(h));
            }
        }
    }
}

TEST_CASE("simulate" * doctest::timeout(300)) {
    SUBCASE("deterministic per seed") {
        ModelSpec spec = parse_model("garch(1,1)");
        const auto a = simulate(spec, garch11(0.1, 0.1, 0.8), 500, 42);
        const auto b = simulate(spec, garch11(0.1, 0.1, 0.8), 500, 42);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.returns()[i] == b.returns()[i]);
        const auto c = simulate(spec, garch11(0.1, 0.1, 0.8), 500, 43);
        bool any_diff = false;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c.returns()[i] != a.returns()[i]) any_diff = true;
        CHECK(any_diff);
    }
    SUBCASE("unconditional variance") {
        ModelSpec spec = parse_model("garch(1,1)");
        const auto flat = simulate(spec, garch11(0.1, 0.0, 0.0), 100000, 7);
        CHECK(backcast_variance(flat) == doctest::Approx(0.1).epsilon(0.05));
        const auto persistent = simulate(spec, garch11(0.1, 0.1, 0.8), 100000, 7);
        CHECK(backcast_variance(persistent) == doctest::Approx(1.0).epsilon(0.10));
    }
    SUBCASE("constraint violations rejected") {
        ModelSpec spec = parse_model("garch(1,1)");
        CHECK_THROWS_AS(simulate(spec, garch11(0.1, 0.5, 0.6), 100, 1), ConstraintViolation);
        CHECK_THROWS_AS(simulate(spec, garch11(-0.1, 0.1, 0.1), 100, 1), ConstraintViolation);
    }
    SUBCASE("true parameters beat perturbed ones on average") {
        ModelSpec spec = parse_model("garch(1,1)");
        const auto truth = garch11(0.1, 0.1, 0.8);
        auto perturbed = garch11(0.14, 0.14, 0.71);
        double margin = 0.0;
        for (int seed = 0; seed < 20; ++seed) {
            const auto sim = simulate(spec, truth, 100000, 1000 + seed);
            const double h0 = backcast_variance(sim);
            margin += qml_objective(spec, perturbed, sim.returns(), h0) -
                      qml_objective(spec, truth, sim.returns(), h0);
        }
        CHECK(margin / 20.0 > 0.0);
    }
}

TEST_CASE("forecast variance") {
    ModelSpec spec = parse_model("garch(1,1)");
    SUBCASE("unit fixed point") {
        // history of one point with h pinned to 1 gives h_T = 1, eps_T = 1
        const auto f = forecast_variance(spec, garch11(0.1, 0.2, 0.7), {1.0}, 1.0, 2);
        CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("one step equals the recursion applied to (eps_T, h_T)") {
        const auto nu = garch11(0.2, 0.15, 0.6);
        std::vector<double> r = {0.3, -1.2, 0.8, 2.0, -0.4};
        const double h0 = backcast_variance(r);
        const auto h = variance_recursion(spec, nu, r, h0);
        const auto f = forecast_variance(spec, nu, r, h0, 1);
        CHECK(f[0] == doctest::Approx(0.2 + 0.15 * r.back() * r.back() + 0.6 * h.back())
                          .epsilon(1e-14));
    }
    SUBCASE("alpha = beta = 0 forecasts omega forever") {
        const auto f = forecast_variance(spec, garch11(0.37, 0.0, 0.0), {1.0, -2.0}, 1.5, 5);
        for (double v : f) CHECK(v == doctest::Approx(0.37).epsilon(1e-15));
    }
    SUBCASE("long-horizon garch forecast approaches the unconditional variance") {
        const auto nu = garch11(0.2, 0.1, 0.8);
        const auto f = forecast_variance(spec, nu, {1.0, -0.5, 0.3}, 0.9, 200);
        CHECK(f.back() == doctest::Approx(0.2 / (1.0 - 0.9)).epsilon(1e-6));
    }
}

TEST_CASE("parameter counts and names") {
    CHECK(parameter_count(parse_model("arch(1)")) == 2);
    CHECK(parameter_count(parse_model("garch(1,1)")) == 3);
    CHECK(parameter_count(parse_model("gjr-garch(1,1,1)")) == 4);
    CHECK(parameter_count(parse_model("egarch(1,1)")) == 4);   // omega, alpha, psi, beta
    CHECK(parameter_count(parse_model("egarch(0,1)")) == 3);   // omega, alpha, psi
    CHECK(parameter_count(parse_model("gjr-egarch(1,1,1)")) == 5);
    CHECK(parameter_count(parse_model("figarch(1,d,1)")) == 4);
    CHECK(parameter_count(parse_model("figarch(0,d,1)")) == 3);

    ModelSpec t = parse_model("garch(1,1)", InnovationDist::student_t(6.0));
    CHECK(parameter_count(t) == 4);
    const auto names = parameter_names(t);
    REQUIRE(names.size() == 4);
    CHECK(names[0] == "omega");
    CHECK(names[1] == "alpha_1");
    CHECK(names[2] == "beta_1");
    CHECK(names[3] == "nu");

    const auto fig = parameter_names(parse_model("figarch(1,d,1)"));
    REQUIRE(fig.size() == 4);
    CHECK(fig[1] == "beta_1");
    CHECK(fig[2] == "phi");
    CHECK(fig[3] == "d");
}

TEST_CASE("model parsing") {
    CHECK(model_name(parse_model("GARCH(2,1)")) == "garch(2,1)");
    CHECK(parse_model("gjr-garch(1,1)").o == 1);
    CHECK(parse_model("egarch(0,1)").p == 0);
    CHECK(parse_model("figarch(0,d,1)").q == 0);
    CHECK(parse_model("figarch(0,d,1)").p == 1);
    CHECK_THROWS_AS(parse_model("garch(0,1)"), ConfigError);
    CHECK_THROWS_AS(parse_model("nonsense(1)"), ConfigError);
    CHECK_THROWS_AS(parse_model("figarch(1,1)"), ConfigError);
}
