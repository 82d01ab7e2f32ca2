#include <doctest.h>

#include <set>
#include <tuple>

#include "catdesign/geometry.hpp"
#include "support.hpp"

using namespace catdesign;
using fixtures::cubic;
using fixtures::site;

TEST_CASE("min image distance examples") {
  const Structure s = cubic(4, {site("A", "Cu", 0, 0, 0), site("B", "Cu", 0.5, 0, 0)});
  CHECK(min_image_distance(s, 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(min_pair_distance(s) == doctest::Approx(2.0).epsilon(1e-12));

  const Structure same = cubic(4, {site("A", "Cu", 0.3, 0.3, 0.3), site("B", "Cu", 0.3, 0.3, 0.3)});
  CHECK(min_image_distance(same, 0, 1) == 0.0);
  CHECK(min_pair_distance(same) == 0.0);

  const Structure one = cubic(3, {site("A", "Cu", 0.1, 0.2, 0.3)});
  CHECK(min_image_distance(one, 0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(min_pair_distance(one) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("degenerate cell is rejected") {
  const Lattice flat = Lattice::from_matrix((Eigen::Matrix3d() << 1, 0, 0, 0, 1, 0, 0, 0, 1e-8).finished());
  const Structure s(flat, {site("A", "Cu", 0, 0, 0), site("B", "Cu", 0.5, 0, 0)});
  CHECK_THROWS_AS(min_image_distance(s, 0, 1), DegenerateCellError);
  CHECK_THROWS_AS(min_pair_distance(s), DegenerateCellError);
  CHECK_THROWS_AS(build_neighbor_list(s, CovalentRadiusTable::standard()), DegenerateCellError);
}

TEST_CASE("geometry matches exhaustive oracle on random cells") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Structure s = fixtures::random_structure(rng, 6);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        CHECK(std::abs(min_image_distance(s, i, j) - fixtures::oracle_min_image(s, i, j)) < 1e-9);
    CHECK(std::abs(min_pair_distance(s) - fixtures::oracle_min_pair(s)) < 1e-9);
  }
}

TEST_CASE("highly skewed cell needs more than one image shell") {
  const Lattice skew = Lattice::from_matrix((Eigen::Matrix3d() << 1, 7.3, 0, 0, 1, 0, 0, 0, 5).finished());
  const Structure s(skew, {site("A", "Cu", 0.1, 0.2, 0.0), site("B", "O", 0.8, 0.5, 0.4)});
  CHECK(std::abs(min_image_distance(s, 0, 1) - fixtures::oracle_min_image(s, 0, 1)) < 1e-9);
  CHECK(std::abs(min_image_distance(s, 0, 0) - fixtures::oracle_min_image(s, 0, 0)) < 1e-9);
}

TEST_CASE("symmetry and translation invariance") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Structure s = fixtures::random_structure(rng, 5);
    const Eigen::Vector3d shift(rng.uniform01(), rng.uniform01(), rng.uniform01());
    auto moved = s.sites();
    for (auto& a : moved) a.frac += shift;
    const Structure t = s.with_sites(moved);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK(std::abs(min_image_distance(s, i, j) - min_image_distance(s, j, i)) < 1e-12);
        CHECK(std::abs(min_image_distance(s, i, j) - min_image_distance(t, i, j)) < 1e-9);
        CHECK(min_pair_distance(s) <= min_image_distance(s, i, j) + 1e-12);
      }
  }
}

TEST_CASE("neighbor list cutoff examples") {
  const auto& radii = CovalentRadiusTable::standard();
  const Structure near = cubic(10, {site("A", "Cu", 0, 0, 0), site("B", "Cu", 0.24, 0, 0)});
  const NeighborList nl = build_neighbor_list(near, radii, 1.0);
  REQUIRE(nl[0].size() == 1);
  CHECK(nl[0][0].site == 1);
  CHECK(nl[0][0].distance == doctest::Approx(2.4));

  const Structure far = cubic(10, {site("A", "Cu", 0, 0, 0), site("B", "Cu", 0.27, 0, 0)});
  CHECK(build_neighbor_list(far, radii, 1.0)[0].empty());

  const NeighborList none = build_neighbor_list(near, radii, 1e-6);
  CHECK(none[0].empty());
  CHECK(none[1].empty());
  CHECK_THROWS_AS(build_neighbor_list(near, radii, 0.0), std::invalid_argument);
}

TEST_CASE("neighbor list is symmetric, bounded, ordered and complete") {
  Rng rng(23);
  const auto& radii = CovalentRadiusTable::standard();
  for (int trial = 0; trial < 200; ++trial) {
    const Structure s = fixtures::random_structure(rng, 6);
    const NeighborList nl = build_neighbor_list(s, radii, 1.2);
    std::set<std::tuple<std::size_t, std::size_t, int, int, int>> entries;
    for (std::size_t i = 0; i < nl.size(); ++i) {
      for (std::size_t k = 0; k < nl[i].size(); ++k) {
        const Neighbor& n = nl[i][k];
        const double cutoff = 1.2 * (radii.radius(s.site(i).element) + radii.radius(s.site(n.site).element));
        CHECK(n.distance <= cutoff + 1e-12);
        const Eigen::Vector3d r =
            s.lattice().to_cartesian(s.site(n.site).frac + Eigen::Vector3d(n.image[0], n.image[1], n.image[2]) -
                                     s.site(i).frac);
        CHECK(std::abs(r.norm() - n.distance) < 1e-9);
        entries.insert({i, n.site, n.image[0], n.image[1], n.image[2]});
        if (k > 0) {
          const Neighbor& p = nl[i][k - 1];
          CHECK(std::tie(p.site, p.image) < std::tie(n.site, n.image));
        }
      }
    }
    for (const auto& [i, j, x, y, z] : entries) CHECK(entries.count({j, i, -x, -y, -z}) == 1);
    // Every bonded pair closest image must appear.
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double cutoff = 1.2 * (radii.radius(s.site(i).element) + radii.radius(s.site(j).element));
        const double d = fixtures::oracle_min_image(s, i, j);
        if (d < cutoff - 1e-9) {
          bool found = false;
          for (const auto& n : nl[i]) found = found || (n.site == j && std::abs(n.distance - d) < 1e-9);
          CHECK(found);
        }
      }
  }
}

TEST_CASE("neighbors within a plain cutoff") {
  const Structure s = cubic(3, {site("A", "Cu", 0, 0, 0)});
  const NeighborList nl = neighbors_within(s, 3.0 + 1e-9);
  CHECK(nl[0].size() == 6);
  CHECK(neighbors_within(s, 4.3)[0].size() == 18);
}

TEST_CASE("volume per atom") {
  CHECK(volume_per_atom(cubic(4, {site("A", "Cu", 0, 0, 0), site("B", "Cu", .5, .5, .5)})) ==
        doctest::Approx(32.0).epsilon(1e-12));
  CHECK(volume_per_atom(cubic(1, {site("A", "H", 0, 0, 0)})) == doctest::Approx(1.0).epsilon(1e-12));
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Structure s = fixtures::random_structure(rng, 4);
    const Eigen::Matrix3d& m = s.lattice().matrix();
    const double triple = std::abs(m.col(0).dot(m.col(1).cross(m.col(2))));
    CHECK(std::abs(volume_per_atom(s) - triple / static_cast<double>(s.size())) < 1e-9);
  }
}

TEST_CASE("tightest contact") {
  const auto& radii = CovalentRadiusTable::standard();
  const Structure s = cubic(10, {site("A", "Cu", 0, 0, 0), site("B", "O", 0.1, 0, 0)});
  const Contact c = tightest_contact(s, radii);
  CHECK(c.distance == doctest::Approx(1.0));
  CHECK(c.radius_sum == doctest::Approx(1.32 + 0.66));
  CHECK(c.ratio() == doctest::Approx(1.0 / 1.98));
}

TEST_CASE("radius table") {
  const auto& radii = CovalentRadiusTable::standard();
  CHECK(radii.radius("Cu") == doctest::Approx(1.32));
  CHECK(radii.radius("H") == doctest::Approx(0.31));
  for (int z = 1; z <= 118; ++z) {
    const double r = radii.radius(element_symbol(z));
    CHECK(r > 0.2);
    CHECK(r < 3.0);
  }
  CHECK_THROWS(radii.radius("Xx"));
  CovalentRadiusTable custom;
  custom.set_radius("Cu", 1.0);
  CHECK(custom.radius("Cu") == 1.0);
  CHECK_THROWS_AS(custom.set_radius("Cu", 3.5), std::invalid_argument);
}
