#include <cmath>
#include <functional>

#include "doctest.h"
#include "dps/difference.hpp"
#include "support.hpp"

using namespace dps;

namespace {

const double kRt2 = std::sqrt(2.0);

RealField line(int n, std::function<double(int)> f) {
    return RealField::from_function(make_domain({0}, {n - 1}), 1, [&](int, const Point& p) { return f(p[0]); });
}

}  // namespace

TEST_SUITE("difference_calculus") {

TEST_CASE("stencils on simple inputs") {
    auto c = line(6, [](int) { return 2.5; });
    auto dc = diff(c, 0, DiffKind::Right);
    for (int n = 0; n < 6; ++n) CHECK(dc.at(Point{n}) == 0.0);

    auto one = line(6, [](int) { return 1.0; });
    CHECK(diff(one, 0, DiffKind::WeightedMean).at(Point{0}) == doctest::Approx(1.0 / kRt2).epsilon(1e-15));
    for (int n = 0; n < 5; ++n)
        CHECK(diff(one, 0, DiffKind::WeightedMean).at(Point{n}) == doctest::Approx(sharp_of_one(n)).epsilon(1e-14));

    auto id = line(6, [](int n) { return double(n); });
    CHECK(diff(id, 0, DiffKind::Left).at(Point{3}) == 1.0);
}

TEST_CASE("weighted mean of an indicator") {
    // hand stencil: output sqrt(k)/sqrt(2) at k-1 and -sqrt(k+1)/sqrt(2) at k+1
    for (int k = 0; k < 7; ++k) {
        auto e = line(8, [k](int n) { return n == k ? 1.0 : 0.0; });
        auto out = diff(e, 0, DiffKind::WeightedMean);
        for (int n = 0; n < 8; ++n) {
            double want = 0.0;
            if (n == k - 1) want = std::sqrt(double(k)) / kRt2;
            if (n == k + 1) want = -std::sqrt(double(k + 1)) / kRt2;
            CHECK(out.at(Point{n}) == doctest::Approx(want).epsilon(1e-15));
        }
    }
}

TEST_CASE("output halo is zero and bad axes are rejected") {
    auto g = test::rng(1);
    auto d = make_domain({0, 0}, {4, 4});
    auto f = test::random_field<double>(d, g);
    auto out = diff(f, 1, DiffKind::WeightedMean);
    CHECK(out.at(Point{2, 5}) == 0.0);
    CHECK(out.at(Point{5, 2}) == 0.0);
    CHECK_THROWS_AS(diff(f, 2, DiffKind::Right), AxisError);
}

TEST_CASE("linearity") {
    auto g = test::rng(2);
    auto d = make_domain({0, 2, 1}, {6, 7, 5});
    std::uniform_real_distribution<double> u(-3, 3);
    for (auto kind : {DiffKind::Right, DiffKind::Left, DiffKind::WeightedMean}) {
        for (int axis = 0; axis < 3; ++axis) {
            auto f = test::random_field<double>(d, g), h = test::random_field<double>(d, g);
            double a = u(g), b = u(g);
            auto lhs = diff(a * f + b * h, axis, kind);
            auto rhs = a * diff(f, axis, kind) + b * diff(h, axis, kind);
            const double scale = std::max(lhs.storage().cwiseAbs().maxCoeff(), 1.0);
            CHECK((lhs - rhs).storage().cwiseAbs().maxCoeff() <= 1e-13 * scale);
        }
    }
}

TEST_CASE("sharp of one decays") {
    CHECK(sharp_of_one(1000000) < 1e-3 * sharp_of_one(0));
    for (int n = 0; n < 50; ++n) CHECK(sharp_of_one(n + 1) < sharp_of_one(n));
}

TEST_CASE_TEMPLATE("product rules on random fields", Scalar, double, Complex) {
    auto g = test::rng(5);
    std::uniform_int_distribution<int> lo(0, 4), ext(2, 15), ax(1, 3);
    for (auto rule : {LeibnizRule::LeibnizRight, LeibnizRule::LeibnizLeft, LeibnizRule::LeibnizSharpForward,
                      LeibnizRule::LeibnizSharpBackward, LeibnizRule::SharpSymmetricProduct}) {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const int dim = ax(g);
            std::vector<int> l(dim), u(dim);
            for (int a = 0; a < dim; ++a) {
                l[a] = lo(g);
                u[a] = l[a] + (dim == 1 ? ext(g) : std::min(ext(g), 6));
            }
            auto d = make_domain(l, u);
            auto f = test::random_field<Scalar>(d, g), h = test::random_field<Scalar>(d, g);
            worst = std::max(worst, check_leibniz(f, h, trial % dim, rule).relative());
        }
        CAPTURE(to_string(rule));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("substituting f = 1 into the sharp product rule") {
    auto g = test::rng(6);
    auto d = make_domain({0}, {9});
    auto one = RealField::from_function(d, 1, [](int, const Point&) { return 1.0; });
    auto h = test::random_field<double>(d, g);
    CHECK(check_leibniz(one, h, 0, LeibnizRule::LeibnizSharpForward).max_abs <= 1e-15);
    CHECK(check_leibniz(h, h, 0, LeibnizRule::SharpSymmetricProduct).relative() <= 1e-13);
}

TEST_CASE("product rules on the full hull with zero extension") {
    auto g = test::rng(7);
    auto d = make_domain({0, 1}, {5, 6});
    auto f = test::random_field<double>(d, g, 1, false), h = test::random_field<double>(d, g, 1, false);
    for (auto rule : {LeibnizRule::LeibnizRight, LeibnizRule::LeibnizLeft, LeibnizRule::LeibnizSharpForward,
                      LeibnizRule::LeibnizSharpBackward, LeibnizRule::SharpSymmetricProduct})
        for (int axis = 0; axis < 2; ++axis)
            CHECK(check_leibniz(f, h, axis, rule, IdentityScope::FullHull).relative() <= 1e-12);
    for (int axis = 0; axis < 2; ++axis) {
        CHECK(check_mixed(f, MixedRule::WeightedSplit, axis, 0, 0, IdentityScope::FullHull).relative() <= 1e-12);
        CHECK(check_mixed(f, MixedRule::WeightedSquare, axis, 0, 0, IdentityScope::FullHull).relative() <= 1e-12);
        CHECK(check_mixed_pair(f, h, axis, IdentityScope::FullHull).relative() <= 1e-12);
    }
}

TEST_CASE_TEMPLATE("weighted splitting rules on random fields", Scalar, double, Complex) {
    auto g = test::rng(8);
    std::uniform_int_distribution<int> lo(0, 4), ext(2, 6);
    for (auto rule : {MixedRule::WeightedSplit, MixedRule::WeightedSplitOfSharp, MixedRule::WeightedSquare,
                      MixedRule::WeightedSharpProduct, MixedRule::WeightedPairProduct}) {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const int dim = 1 + trial % 3;
            std::vector<int> l(dim), u(dim);
            for (int a = 0; a < dim; ++a) {
                l[a] = lo(g);
                u[a] = l[a] + (dim == 1 ? 15 : ext(g));
            }
            auto d = make_domain(l, u);
            auto f = test::random_field<Scalar>(d, g);
            const int mu = trial % dim, nu = (trial / 3) % dim, sigma = (trial / 7) % dim;
            Residual r = rule == MixedRule::WeightedPairProduct
                             ? check_mixed_pair(f, test::random_field<Scalar>(d, g), mu)
                             : check_mixed(f, rule, mu, nu, sigma);
            worst = std::max(worst, r.relative());
        }
        CAPTURE(to_string(rule));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("special substitutions of the splitting rules") {
    auto d = make_domain({0}, {8});
    auto one = RealField::from_function(d, 1, [](int, const Point&) { return 1.0; });
    CHECK(check_mixed(one, MixedRule::WeightedSplit, 0).max_abs <= 1e-15);
    auto g = test::rng(9);
    auto f = test::random_field<double>(d, g);
    CHECK(check_mixed_pair(f, f, 0).relative() <= 1e-12);
    CHECK(check_mixed(f, MixedRule::WeightedSquare, 0).relative() <= 1e-12);
    CHECK_THROWS_AS(check_mixed(f, MixedRule::WeightedPairProduct, 0), AxisError);
    CHECK_THROWS_AS(check_mixed(f, MixedRule::WeightedSplit, 1), AxisError);
    CHECK_THROWS_AS(check_leibniz(f, RealField(make_domain({0}, {7})), 0, LeibnizRule::LeibnizRight),
                    DomainMismatch);
}

TEST_CASE("summation rules") {
    auto sq = line(6, [](int n) { return double(n * n); });
    auto r = telescope_sum(sq, 0, DiffKind::Right, 0, 5);
    CHECK(r.lhs == doctest::Approx(36.0));
    CHECK(r.rhs == doctest::Approx(36.0));

    auto one = line(5, [](int) { return 1.0; });
    auto w = telescope_sum(one, 0, DiffKind::WeightedMean, 0, 4);
    CHECK(w.rhs == doctest::Approx(std::sqrt(5.0) / kRt2).epsilon(1e-15));
    double direct = 0.0;
    for (int n = 0; n <= 4; ++n) direct += sharp_of_one(n);
    CHECK(w.lhs == doctest::Approx(direct).epsilon(1e-14));

    auto g = test::rng(10);
    auto f = test::random_field<double>(make_domain({0}, {7}), g);
    auto l = telescope_sum(f, 0, DiffKind::Left, 1, 6);
    CHECK(l.lhs == doctest::Approx(f.at(Point{6}) - f.at(Point{0})).epsilon(1e-14));
    CHECK(l.rhs == doctest::Approx(l.lhs).epsilon(1e-14));

    CHECK_THROWS_AS(telescope_sum(f, 0, DiffKind::Right, 3, 9), RangeError);
    CHECK_THROWS_AS(telescope_sum(f, 0, DiffKind::Right, 4, 3), RangeError);
}

TEST_CASE_TEMPLATE("summation rules on random fields", Scalar, double, Complex) {
    auto g = test::rng(12);
    std::uniform_int_distribution<int> lo(0, 5), ext(1, 15);
    for (auto kind : {DiffKind::Right, DiffKind::Left, DiffKind::WeightedMean}) {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const int dim = 1 + trial % 2;
            std::vector<int> l(dim), u(dim);
            for (int a = 0; a < dim; ++a) {
                l[a] = lo(g);
                u[a] = l[a] + ext(g);
            }
            auto d = make_domain(l, u);
            auto f = test::random_field<Scalar>(d, g);
            const int axis = trial % dim;
            std::uniform_int_distribution<int> pick(l[axis], u[axis]);
            int a = pick(g), b = pick(g);
            if (a > b) std::swap(a, b);
            auto r = telescope_sum(f, axis, kind, a, b);
            const double scale = std::max(1.0, std::abs(r.lhs));
            worst = std::max(worst, std::abs(r.lhs - r.rhs) / scale);
        }
        CAPTURE(to_string(kind));
        CHECK(worst <= 1e-12);
    }
}

}
