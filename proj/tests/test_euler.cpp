#include <catch2/catch_amalgamated.hpp>

#include "qsynth/euler.hpp"
#include "qsynth/linalg.hpp"

using namespace qsynth;

namespace {

Eigen::Matrix2cd random_su2(Rng& rng) {
  Eigen::Matrix2cd u = haar_random_unitary(1, rng);
  u /= std::sqrt(u.determinant());
  return u;
}

double matdist_up_to_sign(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("euler angle closed forms") {
  REQUIRE((euler_to_su2({0, 0, 0}) - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() == 0.0);

  Eigen::Matrix2cd ry_pi;
  ry_pi << 0, -1, 1, 0;
  REQUIRE((euler_to_su2({std::numbers::pi, 0, 0}) - ry_pi).cwiseAbs().maxCoeff() < 1e-15);

  // always special unitary
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const EulerTriple t{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)};
    const Eigen::Matrix2cd u = euler_to_su2(t);
    REQUIRE(std::abs(u.determinant() - Complex(1, 0)) <= 1e-12);
    REQUIRE((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("su2 euler round trip") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Matrix2cd u = random_su2(rng);
    const Eigen::Matrix2cd back = euler_to_su2(su2_to_euler(u));
    REQUIRE(matdist_up_to_sign(back, u) <= 1e-10);
  }
  // poles of the parametrization
  for (const double a : {0.0, 1.3, -2.7}) {
    REQUIRE(matdist_up_to_sign(euler_to_su2(su2_to_euler(rot_z(a))), rot_z(a)) <= 1e-12);
    REQUIRE(matdist_up_to_sign(euler_to_su2(su2_to_euler(rot_y(std::numbers::pi) * rot_z(a))),
                               rot_y(std::numbers::pi) * rot_z(a)) <= 1e-12);
  }
  REQUIRE(matdist_up_to_sign(euler_to_su2(su2_to_euler(-Eigen::Matrix2cd::Identity())),
                             -Eigen::Matrix2cd::Identity()) <= 1e-12);
}

TEST_CASE("su2_to_euler rejects bad input") {
  Eigen::Matrix2cd not_special = Eigen::Matrix2cd::Identity();
  not_special(1, 1) = std::polar(1.0, 0.3);  // unitary, det != 1
  REQUIRE_THROWS_AS(su2_to_euler(not_special), std::invalid_argument);
  Eigen::Matrix2cd not_unitary;
  not_unitary << 1, 1, 0, 1;
  REQUIRE_THROWS_AS(su2_to_euler(not_unitary), std::invalid_argument);
}

TEST_CASE("alternate axis decompositions reconstruct the gate") {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const Eigen::Matrix2cd u = random_su2(rng);
    const auto zyx = su2_to_zyx(u);
    REQUIRE(matdist_up_to_sign(rot_z(zyx[2]) * rot_y(zyx[1]) * rot_x(zyx[0]), u) <= 1e-10);
    const auto xyx = su2_to_xyx(u);
    REQUIRE(matdist_up_to_sign(rot_x(xyx[2]) * rot_y(xyx[1]) * rot_x(xyx[0]), u) <= 1e-10);
  }
}

TEST_CASE("euler derivative matches finite differences") {
  Rng rng(4);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    EulerTriple t{rng.uniform(0, 6.28), rng.uniform(0, 6.28), rng.uniform(0, 6.28)};
    for (int k = 0; k < 3; ++k) {
      EulerTriple tp = t, tm = t;
      (k == 0 ? tp.theta1 : k == 1 ? tp.theta2 : tp.theta3) += h;
      (k == 0 ? tm.theta1 : k == 1 ? tm.theta2 : tm.theta3) -= h;
      const Eigen::Matrix2cd fd = (euler_to_su2(tp) - euler_to_su2(tm)) / (2 * h);
      REQUIRE((fd - euler_to_su2_derivative(t, k)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}
