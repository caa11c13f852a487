#include "slelab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slelab/error.hpp"

namespace slelab {

SleParams derive_params(double kappa) {
  require(std::isfinite(kappa) && kappa > 0.0 && kappa < 8.0,
          "kappa must lie in (0, 8), got " + std::to_string(kappa));
  SleParams p;
  p.kappa = kappa;
  p.d = 1.0 + kappa / 8.0;
  p.alpha = 8.0 / kappa - 1.0;
  return p;
}

HalfPlanePoint::HalfPlanePoint(double re, double im) : z_(re, im) {
  require(std::isfinite(re) && std::isfinite(im),
          "half-plane point must be finite");
  require(im >= 0.0, "point must lie in the closed upper half-plane");
}

PointConfig::PointConfig(std::vector<HalfPlanePoint> points,
                         std::vector<double> radii)
    : points_(std::move(points)), radii_(std::move(radii)) {
  require(points_.size() == radii_.size(),
          "point and radius lists differ in length");
  gaps_.reserve(points_.size());
  for (std::size_t k = 0; k < points_.size(); ++k) {
    require(std::isfinite(radii_[k]) && radii_[k] > 0.0,
            "radius " + std::to_string(k + 1) + " must be positive");
    const Complex zk = points_[k].z();
    double gap = std::abs(zk);
    for (std::size_t j = 0; j < k; ++j)
      gap = std::min(gap, std::abs(zk - points_[j].z()));
    require(gap > 0.0, "point " + std::to_string(k + 1) +
                           " coincides with the origin or an earlier point");
    gaps_.push_back(gap);
  }
}

PointConfig PointConfig::from_complex(std::span<const Complex> points,
                                      std::span<const double> radii) {
  std::vector<HalfPlanePoint> pts;
  pts.reserve(points.size());
  for (const Complex& z : points) pts.emplace_back(z);
  return {std::move(pts), std::vector<double>(radii.begin(), radii.end())};
}

PointConfig PointConfig::with_radii(std::vector<double> radii) const {
  return {points_, std::move(radii)};
}

PointConfig PointConfig::scaled(double lambda) const {
  require(lambda > 0.0, "scale factor must be positive");
  std::vector<HalfPlanePoint> pts;
  std::vector<double> radii;
  for (std::size_t k = 0; k < size(); ++k) {
    pts.emplace_back(points_[k].z() * lambda);
    radii.push_back(radii_[k] * lambda);
  }
  return {std::move(pts), std::move(radii)};
}

MobiusMap::MobiusMap(double a, double b, double c, double d)
    : a_(a), b_(b), c_(c), d_(d) {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) &&
              std::isfinite(d),
          "Moebius coefficients must be finite");
  require(determinant() > 0.0,
          "Moebius map must satisfy ad - bc > 0 to preserve the half-plane");
}

Complex MobiusMap::apply(Complex w) const {
  return (a_ * w + b_) / (c_ * w + d_);
}

Complex MobiusMap::inverse(Complex z) const {
  return (d_ * z - b_) / (-c_ * z + a_);
}

Complex MobiusMap::inverse_derivative(Complex z) const {
  const Complex den = -c_ * z + a_;
  return determinant() / (den * den);
}

double p_scaling(double y, double x, const SleParams& p) {
  require(y >= 0.0 && x >= 0.0, "P_y(x) needs x >= 0 and y >= 0");
  if (x == 0.0) return 0.0;
  if (x >= y) return std::pow(x, p.alpha);
  const double interior = 2.0 - p.d;
  return std::pow(y, p.alpha - interior) * std::pow(x, interior);
}

double p_ratio(double y, double r, double l, const SleParams& p) {
  require(l > 0.0, "gap l must be positive");
  require(r > 0.0, "radius r must be positive");
  if (r >= l) return 1.0;
  // Factor the ratio per branch so the prefactors cancel exactly.
  const double interior = 2.0 - p.d;
  if (y >= l) return std::pow(r / l, interior);
  if (y <= r) return std::pow(r / l, p.alpha);
  return std::pow(r / y, interior) * std::pow(y / l, p.alpha);
}

double green_halfplane(Complex z, const SleParams& p) {
  require(std::isfinite(z.real()) && std::isfinite(z.imag()),
          "Green's function argument must be finite");
  require(z.imag() > 0.0,
          "Green's function is defined for interior points (Im z > 0)");
  const double sin_arg = z.imag() / std::abs(z);
  return std::pow(z.imag(), p.d - 2.0) * std::pow(sin_arg, p.alpha);
}

double green_domain(Complex z, const MobiusMap& map, const SleParams& p) {
  require(z.imag() > 0.0, "point must be interior to the image domain");
  const Complex pre = map.inverse(z);
  const double jac = std::abs(map.inverse_derivative(z));
  return std::pow(jac, 2.0 - p.d) * green_halfplane(pre, p);
}

double multipoint_interior_bound(const PointConfig& cfg, const SleParams& p) {
  double prod = 1.0;
  for (std::size_t k = 0; k < cfg.size(); ++k)
    prod *= p_ratio(cfg.y(k), cfg.radius(k), cfg.gap(k), p);
  return prod;
}

double multipoint_green_upper(const PointConfig& cfg, const SleParams& p) {
  double prod = 1.0;
  const double exponent = p.alpha - (2.0 - p.d);
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    require(cfg.y(k) > 0.0,
            "interior Green bound needs every point off the real line");
    prod *= std::pow(cfg.y(k), exponent) / p_scaling(cfg.y(k), cfg.gap(k), p);
  }
  return prod;
}

double boundary_green_upper(std::span<const double> xs, const SleParams& p) {
  double prod = 1.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    require(std::isfinite(xs[k]), "boundary coordinate must be finite");
    double gap = std::abs(xs[k]);
    for (std::size_t j = 0; j < k; ++j)
      gap = std::min(gap, std::abs(xs[k] - xs[j]));
    require(gap > 0.0, "boundary points must be distinct and nonzero");
    prod *= std::pow(gap, -p.alpha);
  }
  return prod;
}

}  // namespace slelab
