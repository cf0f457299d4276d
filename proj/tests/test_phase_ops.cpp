#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "doctest.h"
#include "dps/difference.hpp"
#include "dps/phase_ops.hpp"
#include "support.hpp"

using namespace dps;

namespace {
const double kRt2 = std::sqrt(2.0);
}

TEST_SUITE("phase_ops") {

TEST_CASE("weighted-mean matrix by hand") {
    Eigen::Matrix3d want;
    want << 0, 1 / kRt2, 0, -1 / kRt2, 0, 1, 0, -1, 0;
    CHECK((real_op(OpKind::DeltaSharp, 3) - want).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(op_matrix(OpKind::Q, 1), SizeError);
}

TEST_CASE("Q from its defining expression") {
    auto Q = real_op(OpKind::Q, 6);
    // applied to the n = 0 coordinate vector: only n = 1 is hit, weight 1/sqrt2
    Eigen::VectorXd e0 = Eigen::VectorXd::Unit(6, 0);
    Eigen::VectorXd col = Q * e0;
    CHECK(col(1) == doctest::Approx(1 / kRt2).epsilon(1e-15));
    col(1) = 0;
    CHECK(col.cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    for (int n = 0; n + 1 < 6; ++n) CHECK(Q(n, n + 1) == doctest::Approx(std::sqrt(n + 1.0) / kRt2).epsilon(1e-14));
    CHECK(Q.diagonal().cwiseAbs().maxCoeff() <= 1e-14);

    // shifted range: row `first` has no lower neighbour
    auto Qs = real_op(OpKind::Q, 4, 3);
    CHECK(Qs(0, 1) == doctest::Approx(2.0 / kRt2).epsilon(1e-14));
    CHECK(Qs(1, 0) == doctest::Approx(2.0 / kRt2).epsilon(1e-14));
}

TEST_CASE("P is hermitian with a real symmetric spectrum") {
    for (int n : {2, 5, 17, 64}) {
        auto P = op_matrix(OpKind::P, n);
        CHECK((P.entries - P.entries.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        auto s = spectrum(P);
        for (int k = 0; k < n; ++k) CHECK(s.values(k) == doctest::Approx(-s.values(n - 1 - k)).epsilon(1e-12));
        const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
        CHECK((s.vectors.adjoint() * s.vectors - I).cwiseAbs().maxCoeff() <= 1e-10);
    }
    auto s2 = spectrum(op_matrix(OpKind::P, 2));
    CHECK(s2.values(0) == doctest::Approx(-1 / kRt2).epsilon(1e-14));
    CHECK(s2.values(1) == doctest::Approx(1 / kRt2).epsilon(1e-14));
    CHECK_THROWS_AS(spectrum(op_matrix(OpKind::DeltaSharp, 4)), NotHermitian);
}

TEST_CASE("number operator spectrum") {
    auto P = op_matrix(OpKind::P, 60), Q = op_matrix(OpKind::Q, 60);
    auto s = spectrum(Eigen::MatrixXcd(P.entries * P.entries + Q.entries * Q.entries));
    for (int n = 0; n < 10; ++n) CHECK(std::abs(s.values(n) - (2 * n + 1)) <= 1e-6);
}

TEST_CASE("canonical commutator away from the edge") {
    auto r = commutator_check(op_matrix(OpKind::P, 40), op_matrix(OpKind::Q, 40));
    CHECK(r.rows_checked == 38);
    CHECK(r.deviation <= 1e-12);
    auto small = commutator_check(op_matrix(OpKind::P, 4), op_matrix(OpKind::Q, 4), 0);
    CHECK(small.deviation > 0.1);  // the truncated last row is off
    // a shifted range loses the lower neighbour too; the inset hides both edges
    CHECK(commutator_check(op_matrix(OpKind::P, 30, 5), op_matrix(OpKind::Q, 30, 5)).deviation <= 1e-12);
    CHECK(commutator_check(op_matrix(OpKind::P, 30, 5), op_matrix(OpKind::Q, 30, 5), 0).deviation > 1.0);
    CHECK_THROWS_AS(commutator_check(op_matrix(OpKind::P, 4), op_matrix(OpKind::Q, 5)), SizeMismatch);
}

TEST_CASE("generator: translations") {
    auto d = make_domain({0, 0, 0}, {3, 4, 2});
    auto g4 = generator_matrix(PoincareParams::translation(3, 0.3), Rep::DiffDiffRep, SpinBlock::scalar(), d);
    CHECK(g4.constant.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g4.needs_dt);
    CHECK((g4.dt_coeff + 0.3 * Eigen::MatrixXcd::Identity(60, 60)).cwiseAbs().maxCoeff() == 0.0);

    auto g1 = generator_matrix(PoincareParams::translation(0, 0.7), Rep::DiffDiffRep, SpinBlock::scalar(), d);
    auto g = test::rng(1);
    auto f = test::random_field<Complex>(d, g, 1, false);
    auto d1 = diff(f, 0, DiffKind::WeightedMean);
    Eigen::VectorXcd want = -0.7 * d1.flatten();
    CHECK((g1.constant * f.flatten() - want).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK_FALSE(g1.needs_dt);
}

TEST_CASE("generator: rotation is odd under axis exchange and anti-hermitian") {
    auto d = make_domain({0, 0}, {5, 5});
    auto G = generator_matrix(PoincareParams::rotation(0, 1, 0.4), Rep::DifferenceRep, SpinBlock::scalar(), d).constant;
    const Eigen::Index n = 36;
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
    d.for_each_point([&](const Point& p) {
        X(static_cast<Eigen::Index>(d.linear_index(p)), static_cast<Eigen::Index>(d.linear_index(Point{p[1], p[0]}))) = 1.0;
    });
    CHECK((X * G * X + G).cwiseAbs().maxCoeff() <= 1e-14);

    auto mix = PoincareParams::rotation(0, 1, 0.4) + PoincareParams::translation(1, -0.2) +
               PoincareParams::translation(0, 0.9);
    auto G2 = generator_matrix(mix, Rep::DifferenceRep, SpinBlock::scalar(), d).constant;
    CHECK((G2 + G2.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("generator is linear in the parameters") {
    auto d = make_domain({0, 0, 0}, {3, 3, 3});
    auto p = PoincareParams::rotation(0, 2, 0.1) + PoincareParams::rotation(1, 3, 0.2) + PoincareParams::translation(2, 0.3);
    auto a = generator_matrix(p, Rep::DiffDiffRep, SpinBlock::scalar(), d);
    auto b = generator_matrix(p.scaled(2.0), Rep::DiffDiffRep, SpinBlock::scalar(), d);
    CHECK((b.constant - 2.0 * a.constant).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((b.t_coeff - 2.0 * a.t_coeff).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((b.dt_coeff - 2.0 * a.dt_coeff).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("spin blocks") {
    auto v = SpinBlock::vector();
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) CHECK((v.S[mu][nu] + v.S[nu][mu]).cwiseAbs().maxCoeff() == 0.0);
    // S^1_{12 2} = eta_22 = 1, S^2_{12 1} = -eta_11 = -1
    CHECK(v.S[0][1](0, 1) == Complex(1.0));
    CHECK(v.S[0][1](1, 0) == Complex(-1.0));

    auto d = make_domain({0, 0}, {2, 2});
    auto G = generator_matrix(PoincareParams::rotation(0, 1, 0.3), Rep::DifferenceRep, v, d).constant;
    CHECK(G.rows() == 36);
    // orbital part acts per component and is anti-hermitian; (i/2) eps S is hermitian for the real S
    auto Gs = generator_matrix(PoincareParams::rotation(0, 1, 0.3), Rep::DifferenceRep, SpinBlock::scalar(), d).constant;
    Eigen::MatrixXcd orbital = Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(4, 4), Gs);
    Eigen::MatrixXcd spin_part = G - orbital;
    CHECK((orbital + orbital.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((spin_part - spin_part.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(spin_part(0, 9) == Complex(0.0, 0.3));

    SpinBlock bad = SpinBlock::scalar();
    bad.components = 2;
    CHECK_THROWS_AS(generator_matrix(PoincareParams::translation(0, 1), Rep::DifferenceRep, bad, d), SpinShapeError);
    CHECK_THROWS_AS(generator_matrix(PoincareParams::translation(2, 1), Rep::DifferenceRep, SpinBlock::scalar(), d),
                    AxisError);
}

TEST_CASE("Lorentz constraint") {
    auto rot = FinitePoincare::from_lorentz(lorentz_rotation(0, 2, 0.8));
    CHECK(rot.constraint().cwiseAbs().maxCoeff() <= 1e-14);
    auto boost = FinitePoincare::from_lorentz(lorentz_boost(1, 0.6) * lorentz_rotation(0, 1, 0.3));
    CHECK(boost.constraint().cwiseAbs().maxCoeff() <= 1e-13);
    Eigen::Matrix4d junk = Eigen::Matrix4d::Identity();
    junk(0, 1) = 0.5;
    CHECK(FinitePoincare::from_lorentz(junk).constraint().cwiseAbs().maxCoeff() > 0.1);
    // small angle: effective eps^{mu nu} is antisymmetric
    auto p = FinitePoincare::from_lorentz(lorentz_rotation(0, 1, 1e-3)).generator_params();
    CHECK((p.eps2 + p.eps2.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(p.eps2(0, 1) + std::sin(1e-3)) <= 1e-15);
}

}
