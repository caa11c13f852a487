#pragma once

// SLE parameters, the two-regime scaling function P_y, Green's functions
// and the closed-form multi-point bound products. Every bound is returned
// with its unknown multiplicative constant set to 1.

#include <complex>
#include <span>
#include <vector>

namespace slelab {

using Complex = std::complex<double>;

struct SleParams {
  double kappa = 0.0;
  double d = 0.0;      // 1 + kappa/8, dimension of the trace
  double alpha = 0.0;  // 8/kappa - 1, boundary exponent
};

/// Validated constructor for SleParams; kappa must lie in (0, 8).
SleParams derive_params(double kappa);

/// A point of the closed upper half-plane.
class HalfPlanePoint {
 public:
  HalfPlanePoint(double re, double im);
  explicit HalfPlanePoint(Complex z) : HalfPlanePoint(z.real(), z.imag()) {}

  double re() const noexcept { return z_.real(); }
  double im() const noexcept { return z_.imag(); }
  Complex z() const noexcept { return z_; }
  bool on_boundary() const noexcept { return z_.imag() == 0.0; }

 private:
  Complex z_;
};

/// Marked points z_1..z_n with radii r_k; z_0 = 0 is implicit.
/// gap(k) is the distance from z_k to {0, z_1, ..., z_{k-1}}.
class PointConfig {
 public:
  PointConfig() = default;
  PointConfig(std::vector<HalfPlanePoint> points, std::vector<double> radii);

  static PointConfig from_complex(std::span<const Complex> points,
                                  std::span<const double> radii);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const HalfPlanePoint& point(std::size_t k) const { return points_.at(k); }
  double radius(std::size_t k) const { return radii_.at(k); }
  double gap(std::size_t k) const { return gaps_.at(k); }
  double y(std::size_t k) const { return points_.at(k).im(); }

  const std::vector<HalfPlanePoint>& points() const noexcept { return points_; }
  const std::vector<double>& radii() const noexcept { return radii_; }
  const std::vector<double>& gaps() const noexcept { return gaps_; }

  PointConfig with_radii(std::vector<double> radii) const;
  /// Multiplies every point and radius by lambda > 0.
  PointConfig scaled(double lambda) const;

 private:
  std::vector<HalfPlanePoint> points_;
  std::vector<double> radii_;
  std::vector<double> gaps_;
};

/// Real Moebius map w -> (a w + b) / (c w + d) with ad - bc > 0, an
/// automorphism of the upper half-plane.
class MobiusMap {
 public:
  MobiusMap(double a, double b, double c, double d);
  static MobiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }

  Complex apply(Complex w) const;
  Complex inverse(Complex z) const;
  Complex inverse_derivative(Complex z) const;
  double determinant() const noexcept { return a_ * d_ - b_ * c_; }

 private:
  double a_, b_, c_, d_;
};

/// P_y(x): y^{alpha-(2-d)} x^{2-d} for x <= y, x^alpha for x >= y.
double p_scaling(double y, double x, const SleParams& p);

/// P_y(min(r, l)) / P_y(l), in (0, 1].
double p_ratio(double y, double r, double l, const SleParams& p);

/// One-point Green's function in H from 0 to infinity, constant set to 1:
/// Im(z)^{d-2} sin^alpha(arg z).
double green_halfplane(Complex z, const SleParams& p);

/// Green's function of the image domain under a half-plane automorphism F,
/// |(F^{-1})'(z)|^{2-d} G(F^{-1}(z)).
double green_domain(Complex z, const MobiusMap& map, const SleParams& p);

/// prod_k P_{y_k}(r_k ^ l_k) / P_{y_k}(l_k).
double multipoint_interior_bound(const PointConfig& cfg, const SleParams& p);

/// prod_k y_k^{alpha-(2-d)} / P_{y_k}(l_k); all points must be interior.
double multipoint_green_upper(const PointConfig& cfg, const SleParams& p);

/// prod_k l_k^{-alpha} with l_k = min_{0<=j<k} |x_k - x_j|, x_0 = 0.
double boundary_green_upper(std::span<const double> xs, const SleParams& p);

}  // namespace slelab
