#include <doctest.h>

#include "cgsense/density.hpp"
#include "cgsense/errors.hpp"
#include "cgsense/simulator.hpp"
#include "oracles.hpp"

using namespace cgsense;

namespace {

GridGeometry geometry(int n, double ratio = 2.0) {
  GridGeometry g;
  g.matrix_size = n;
  g.grid_size = static_cast<int>(std::lround(n * ratio));
  g.oversampling_ratio = ratio;
  g.delta_k = 1.0 / g.grid_size;
  return g;
}

// Complete Cartesian sampling of the central box, far enough from the grid
// edge and the circular support bound that every footprint is whole.
Array3D<double> cartesian_box(int half_extent) {
  const int side = 2 * half_extent + 1;
  Array3D<double> t(3, side, side);
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      t(0, i, j) = static_cast<double>(j - half_extent);
      t(1, i, j) = static_cast<double>(i - half_extent);
    }
  }
  return t;
}

// Brute-force unnormalized density at each sample: grid-then-degrid written
// as the double kernel sum over grid cells.
std::vector<double> density_by_direct_summation(const Array3D<double>& traj, const GriddingKernel& k,
                                                const GridGeometry& g) {
  Array2D<Cx> ones(traj.dim1(), traj.dim2(), Cx{1.0, 0.0});
  const Array2D<Cx> grid = oracles::grid_by_direct_summation(ones, traj, k, g);
  const int n_os = g.grid_size;
  const double center = n_os / 2.0;
  std::vector<double> density;
  for (index_t s = 0; s < traj.dim1(); ++s) {
    for (index_t r = 0; r < traj.dim2(); ++r) {
      const double kx = traj(0, s, r), ky = traj(1, s, r);
      double acc = 0.0;
      for (int gy = 0; gy < n_os; ++gy) {
        const double wy = k.at(std::abs(static_cast<double>(gy) - (ky + center)));
        if (wy == 0.0) continue;
        for (int gx = 0; gx < n_os; ++gx) {
          const double wx = k.at(std::abs(static_cast<double>(gx) - (kx + center)));
          if (wx == 0.0) continue;
          acc += wx * wy * grid(gy, gx).real();
        }
      }
      density.push_back(acc);
    }
  }
  return density;
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("gridded-ones: complete Cartesian sampling gives constant weights") {
  // Samples on the boundary band of the (finite) sampled region see fewer
  // neighbors by construction -- no wrap-around -- so uniformity is asserted
  // over samples at least a kernel width inside the hull.
  const GridGeometry g = geometry(32);  // grid 64, support radius 32
  const GriddingKernel k = build_kernel(5, 10000, 2.0);
  const int extent = 20;
  const auto traj = cartesian_box(extent);
  const DensityWeights w = dcf_gridded_ones(traj, k, g);
  double lo = 2.0, hi = -1.0;
  for (index_t s = 0; s < traj.dim1(); ++s) {
    for (index_t r = 0; r < traj.dim2(); ++r) {
      if (std::max(std::abs(traj(0, s, r)), std::abs(traj(1, s, r))) > extent - k.width) continue;
      lo = std::min(lo, w.weights(s, r));
      hi = std::max(hi, w.weights(s, r));
    }
  }
  CHECK(hi > 0.0);
  CHECK((hi - lo) / hi < 1e-6);
}

TEST_CASE("gridded-ones: duplicated samples halve the pre-normalization weights") {
  const GridGeometry g = geometry(8);
  const GriddingKernel k = build_kernel(5, 2000, 2.0);
  const auto traj = make_radial_trajectory(5, 12, g.grid_size);

  Array3D<double> doubled(3, 10, 12);
  for (int a = 0; a < 3; ++a) {
    for (int s = 0; s < 5; ++s) {
      for (int r = 0; r < 12; ++r) {
        doubled(a, s, r) = traj(a, s, r);
        doubled(a, s + 5, r) = traj(a, s, r);
      }
    }
  }

  // Brute-force densities: duplication must double the density everywhere,
  // i.e. halve the reciprocal weight before max-normalization.
  const auto d1 = density_by_direct_summation(traj, k, g);
  const auto d2 = density_by_direct_summation(doubled, k, g);
  for (size_t i = 0; i < d1.size(); ++i) {
    CHECK(d2[i] == doctest::Approx(2.0 * d1[i]).epsilon(1e-10));
  }

  // And the library's normalized weights agree with the oracle's.
  const DensityWeights w = dcf_gridded_ones(traj, k, g);
  double dmin = 1e300;
  for (double v : d1) dmin = std::min(dmin, v);
  for (size_t i = 0; i < d1.size(); ++i) {
    CHECK(w.weights.data()[i] == doctest::Approx(dmin / d1[i]).epsilon(1e-9));
  }
}

TEST_CASE("gridded-ones: radial weights grow with radius along a spoke") {
  const GridGeometry g = geometry(32);
  const GriddingKernel k = build_kernel(5, 10000, 2.0);
  const auto traj = make_radial_trajectory(64, 64, g.grid_size);
  const DensityWeights w = dcf_gridded_ones(traj, k, g);

  // Second half of spoke 0 runs from DC outward; skip the kernel-width
  // neighborhood of DC and the outermost edge samples.
  for (int r = 36; r < 61; ++r) {
    CAPTURE(r);
    CHECK(w.weights(0, r + 1) > w.weights(0, r));
  }
}

TEST_CASE("gridded-ones: coincident trajectory is degenerate") {
  const GridGeometry g = geometry(8);
  const GriddingKernel k = build_kernel(3, 1000, 2.0);
  Array3D<double> traj(3, 2, 4);
  for (index_t s = 0; s < 2; ++s) {
    for (index_t r = 0; r < 4; ++r) {
      traj(0, s, r) = 1.0;
      traj(1, s, r) = -2.0;
    }
  }
  CHECK_THROWS_AS(dcf_gridded_ones(traj, k, g), Error);
}

TEST_CASE("ramp: maximal radius gets weight 1") {
  const auto traj = make_radial_trajectory(8, 32, 32);
  const DensityWeights w = dcf_ramp(traj);
  double hi = 0.0;
  for (double v : w.weights.flat()) hi = std::max(hi, v);
  CHECK(hi == doctest::Approx(1.0));
  CHECK(w.weights(0, 0) == doctest::Approx(1.0));  // readout starts at -n_os/2
}

TEST_CASE("ramp: DC sample takes the smallest positive spoke weight") {
  const auto traj = make_radial_trajectory(4, 8, 8);  // readout hits k = 0 exactly
  const DensityWeights w = dcf_ramp(traj);
  for (index_t s = 0; s < 4; ++s) {
    double min_pos = 1e300;
    for (index_t r = 0; r < 8; ++r) {
      const double rad = std::hypot(traj(0, s, r), traj(1, s, r));
      if (rad > 0.0) min_pos = std::min(min_pos, rad / 4.0);  // max radius is 4
    }
    bool saw_dc = false;
    for (index_t r = 0; r < 8; ++r) {
      if (std::hypot(traj(0, s, r), traj(1, s, r)) == 0.0) {
        saw_dc = true;
        CHECK(w.weights(s, r) == doctest::Approx(min_pos));
        CHECK(w.weights(s, r) > 0.0);
      }
    }
    CHECK(saw_dc);
  }
}

TEST_CASE("both variants are invariant under global trajectory scaling") {
  const GridGeometry g = geometry(16);
  const GriddingKernel k = build_kernel(5, 4000, 2.0);
  const auto traj = make_radial_trajectory(17, 32, g.grid_size);
  const DensityWeights ramp0 = dcf_ramp(traj);
  const DensityWeights ones0 = dcf_gridded_ones(traj, k, g);

  Array3D<double> scaled = traj;
  for (double& v : scaled.flat()) v *= 0.5;
  const DensityWeights ramp1 = dcf_ramp(scaled);
  for (index_t i = 0; i < ramp0.weights.size(); ++i) {
    CHECK(ramp1.weights.data()[i] == doctest::Approx(ramp0.weights.data()[i]).epsilon(1e-12));
  }

  // The gridded-ones variant sees a proportionally smaller grid. The relative
  // sampling geometry is unchanged; the kernel footprint covers twice the
  // relative area on the halved grid, so agreement is approximate.
  GridGeometry g2 = geometry(8);
  const DensityWeights ones1 = dcf_gridded_ones(scaled, k, g2);
  for (index_t i = 0; i < ones0.weights.size(); ++i) {
    CHECK(std::abs(ones1.weights.data()[i] - ones0.weights.data()[i]) < 0.1);
  }

  // On complete Cartesian sampling (interior band) the invariance is exact:
  // both scalings yield constant interior weights.
  const int extent = 10;
  const auto cart = cartesian_box(extent);
  GridGeometry gc = geometry(16);  // grid 32
  Array3D<double> cart2 = cart;
  for (double& v : cart2.flat()) v *= 2.0;
  GridGeometry gc2 = geometry(32);
  const DensityWeights wc = dcf_gridded_ones(cart, k, gc);
  const DensityWeights wc2 = dcf_gridded_ones(cart2, k, gc2);
  double ref1 = -1.0, ref2 = -1.0;
  for (index_t s = 0; s < cart.dim1(); ++s) {
    for (index_t r = 0; r < cart.dim2(); ++r) {
      if (std::max(std::abs(cart(0, s, r)), std::abs(cart(1, s, r))) > extent - k.width) continue;
      if (ref1 < 0.0) {
        ref1 = wc.weights(s, r);
        ref2 = wc2.weights(s, r);
      }
      CHECK(wc.weights(s, r) == doctest::Approx(ref1).epsilon(1e-9));
      CHECK(wc2.weights(s, r) == doctest::Approx(ref2).epsilon(1e-9));
    }
  }
}

TEST_CASE("weights always lie in [0, 1]") {
  const GridGeometry g = geometry(16);
  const GriddingKernel k = build_kernel(5, 4000, 2.0);
  const auto traj = make_radial_trajectory(13, 32, g.grid_size);
  for (const DensityWeights& w : {dcf_ramp(traj), dcf_gridded_ones(traj, k, g)}) {
    for (double v : w.weights.flat()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-15);
    }
  }
}

}  // TEST_SUITE
