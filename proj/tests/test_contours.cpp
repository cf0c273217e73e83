#include <cmath>

#include <gtest/gtest.h>

#include "besselgap/contours.hpp"

using namespace besselgap;

namespace {

cplx closing_segment_winding(const contour& c) {
  // straight segment from the end of the upper ray back to the start of the lower ray
  const cplx a = c.points.back() / std::abs(c.points.back()) * c.truncation_radius;
  const cplx b = std::conj(a);
  const auto r = map_to_interval(gauss_legendre(200), 0.0, 1.0);
  cplx s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * (b - a) / (a + (b - a) * r.nodes[k]);
  return s / cplx(0.0, 2.0 * pi);
}

}  // namespace

TEST(Contours, ArcPassesThroughOne) {
  const contour g = build_gamma(3 * pi / 4, 1.0, 50.0, 41);
  EXPECT_NEAR(std::abs(g.points[41 + 20] - cplx(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Contours, ClosedWindingIsOne) {
  const contour g = build_gamma(3 * pi / 4, 1.0, 50.0, 60);
  EXPECT_NEAR(std::abs(winding_sum(g) + closing_segment_winding(g) - 1.0), 0.0, 1e-8);
}

TEST(Contours, RayWeightSums) {
  const double r = 1.5, R = 80.0, th = 2.4;
  const int n = 40;
  const contour g = build_gamma(th, r, R, n);
  cplx lower = 0.0, upper = 0.0;
  for (int k = 0; k < n; ++k) {
    lower += g.weights[k];
    upper += g.weights[2 * n + k];
  }
  EXPECT_NEAR(std::abs(upper - (R - r) * std::polar(1.0, th)), 0.0, 1e-11);
  EXPECT_NEAR(std::abs(lower - (r - R) * std::polar(1.0, -th)), 0.0, 1e-11);
}

TEST(Contours, GeometryErrors) {
  EXPECT_THROW(build_gamma(1.0, 1.0, 10.0, 10), geometry_error);
  EXPECT_THROW(build_gamma(2.5, 10.0, 5.0, 10), geometry_error);
}

TEST(Contours, InversionInvolution) {
  const contour g = build_gamma(3 * pi / 4, 1.5, 100.0, 30);
  const contour gh = invert(g);
  EXPECT_EQ(gh.label, contour_label::gamma_hat);
  const contour back = invert(gh);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(std::abs(back.points[k] - g.points[k]), 0.0, 1e-14 * std::abs(g.points[k]));
    EXPECT_NEAR(std::abs(back.weights[k] - g.weights[k]), 0.0, 1e-13 * std::abs(g.weights[k]));
  }
  // the arc of radius 1.5 maps onto radius 1/1.5
  EXPECT_NEAR(std::abs(gh.points[45]), 1.0 / 1.5, 1e-15);
}

TEST(Contours, InversionReversesWinding) {
  const contour g = build_gamma(3 * pi / 4, 1.0, 50.0, 60);
  EXPECT_NEAR(std::abs(winding_sum(invert(g)) + winding_sum(g)), 0.0, 1e-13);
}

TEST(Contours, ShiftedInversion) {
  const contour g = build_gamma(3 * pi / 4, 1.5, 100.0, 30);
  const contour a = invert(g);
  const contour b = invert_shift(g, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(a.points[k], b.points[k]);
  const contour c = invert_shift(g, 0.1, 1);
  EXPECT_EQ(c.shift_index, 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(std::abs(c.points[k] - (a.points[k] - 0.4)), 0.0, 1e-15);
    EXPECT_LE(std::abs(c.points[k] + 0.4), 1.0 / 1.5 + 1e-15);
  }
}

TEST(Contours, CutClearance) {
  const contour g = build_gamma(3 * pi / 4, 1.5, 100.0, 30);
  EXPECT_GT(cut_clearance(g), 1e-3);
  EXPECT_GT(cut_clearance(invert(g)), 1e-3);
  EXPECT_NO_THROW(require_cut_clearance(g));
}

TEST(Contours, DefaultGeometryDisjointFromImage) {
  const contour g = build_gamma(3 * pi / 4, 1.5, 220.0, 60);
  EXPECT_GT(min_distance(g, invert(g)), 0.1);
}
