#include <doctest.h>

#include "photonstat/numerics/least_squares.hpp"
#include "photonstat/numerics/rng.hpp"

#include <cmath>
#include <stdexcept>

using namespace photonstat::numerics;

namespace {

FitProblem exponential_problem(const std::vector<double>& t, const std::vector<double>& y) {
    FitProblem p;
    p.observed = y;
    p.initial = {1.0, 1.0};
    p.names = {"a", "tau"};
    p.model = [t](std::span<const double> x) {
        std::vector<double> f(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) f[i] = x[0] * std::exp(-t[i] / x[1]);
        return f;
    };
    return p;
}

}  // namespace

TEST_CASE("straight line is solved in one step") {
    std::vector<double> y;
    for (int i = 0; i < 10; ++i) y.push_back(3.0 - 0.5 * i);
    FitProblem p;
    p.observed = y;
    p.initial = {0.0, 0.0};
    p.model = [](std::span<const double> x) {
        std::vector<double> f(10);
        for (int i = 0; i < 10; ++i) f[static_cast<std::size_t>(i)] = x[0] + x[1] * i;
        return f;
    };
    const FitResult r = least_squares(p);
    CHECK(r.converged);
    CHECK(r.params[0] == doctest::Approx(3.0));
    CHECK(r.params[1] == doctest::Approx(-0.5));
    CHECK(r.chi2 < 1e-12);
}

TEST_CASE("exponential recovery and covariance") {
    std::vector<double> t, y;
    RandomStream rng(5, 0);
    for (int i = 0; i < 200; ++i) {
        t.push_back(0.05 * i);
        y.push_back(10.0 * std::exp(-t.back() / 2.0) + rng.normal(0.0, 0.05));
    }
    FitProblem p = exponential_problem(t, y);
    p.weights.assign(t.size(), 1.0 / (0.05 * 0.05));
    const FitResult r = least_squares(p);
    REQUIRE(r.converged);
    CHECK(r.params[0] == doctest::Approx(10.0).epsilon(0.01));
    CHECK(std::abs(r.params[1] - 2.0) < 4.0 * r.sigma(1));
    CHECK(r.sigma(1) > 0.0);
    CHECK(r.reduced_chi2 == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("bounds are respected and a parameter can rest on one") {
    std::vector<double> t, y;
    for (int i = 0; i < 50; ++i) {
        t.push_back(0.1 * i);
        y.push_back(5.0 * std::exp(-t.back() / 1.0));
    }
    FitProblem p = exponential_problem(t, y);
    p.lower = {0.0, 1.5};
    p.upper = {100.0, 10.0};
    p.initial = {1.0, 3.0};
    const FitResult r = least_squares(p);
    CHECK(r.converged);
    CHECK(r.params[1] == doctest::Approx(1.5));
}

TEST_CASE("errors") {
    FitProblem p = exponential_problem({0, 1, 2}, {1, 0.5, 0.25});
    p.lower = {0.0, 2.0};
    p.upper = {10.0, 5.0};
    CHECK_THROWS_AS(least_squares(p), std::invalid_argument);  // initial tau below its bound

    FitProblem dead;
    dead.observed = {1, 2, 3};
    dead.initial = {1.0, 1.0};
    dead.model = [](std::span<const double> x) { return std::vector<double>{x[0], x[0], x[0]}; };
    CHECK_THROWS_AS(least_squares(dead), FitError);

    FitProblem few = exponential_problem({0}, {1});
    CHECK_THROWS_AS(least_squares(few), std::invalid_argument);
}

TEST_CASE("iteration cap reports non-convergence") {
    std::vector<double> t, y;
    for (int i = 0; i < 50; ++i) {
        t.push_back(0.1 * i);
        y.push_back(5.0 * std::exp(-t.back() / 0.7));
    }
    FitProblem p = exponential_problem(t, y);
    p.initial = {0.01, 40.0};
    p.max_iterations = 1;
    const FitResult r = least_squares(p);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
}
