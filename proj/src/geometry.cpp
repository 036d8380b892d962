#include "domelimit/geometry.hpp"

#include <algorithm>
#include <string>

namespace dome {

const char* component_name(int c) {
  static const char* names[kStressComponents] = {
      "N_phi", "N_thetaphi", "N_phitheta", "N_theta", "T_phi",
      "T_theta", "M_phi", "M_phitheta", "M_theta"};
  return (c >= 0 && c < kStressComponents) ? names[c] : "?";
}

namespace {

// Fritsch-Carlson slopes for a monotone piecewise cubic Hermite interpolant.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2 * h[i] + h[i - 1];
      const double w2 = h[i] + 2 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3 * d0)) return 3 * d0;
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

void hermite(double x0, double x1, double y0, double y1, double d0, double d1,
             double x, double& y, double& dy) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  y = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
      (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
  dy = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * d0 +
        (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * h * d1) /
       h;
}

}  // namespace

TabulatedMeridian::TabulatedMeridian(std::vector<double> r,
                                     std::vector<double> z, double phi_in,
                                     double phi_fin)
    : r_(std::move(r)), z_(std::move(z)) {
  if (r_.size() != z_.size() || r_.size() < 3)
    throw ConfigError("tabulated meridian needs at least 3 (r, z) samples");
  if (!(phi_fin > phi_in))
    throw ConfigError("tabulated meridian: empty parameter range");
  std::vector<double> s(r_.size(), 0.0);
  for (std::size_t i = 1; i < r_.size(); ++i) {
    const double ds = std::hypot(r_[i] - r_[i - 1], z_[i] - z_[i - 1]);
    if (!(ds > 0.0))
      throw ConfigError("tabulated meridian: repeated sample at index " +
                        std::to_string(i));
    s[i] = s[i - 1] + ds;
  }
  knots_.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    knots_[i] = phi_in + (phi_fin - phi_in) * s[i] / s.back();
  knots_.back() = phi_fin;
  dr_ = pchip_slopes(knots_, r_);
  dz_ = pchip_slopes(knots_, z_);
}

void TabulatedMeridian::evaluate(double phi, double& r, double& z, double& dr,
                                 double& dz) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), phi);
  std::size_t i = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
  hermite(knots_[i], knots_[i + 1], r_[i], r_[i + 1], dr_[i], dr_[i + 1], phi,
          r, dr);
  hermite(knots_[i], knots_[i + 1], z_[i], z_[i + 1], dz_[i], dz_[i + 1], phi,
          z, dz);
}

MeridianGeometry MeridianGeometry::sphere(double R, double phi_fin,
                                          double phi_in) {
  MeridianGeometry g;
  g.kind = MeridianKind::sphere;
  g.R = R;
  g.b = R;
  g.phi_in = phi_in;
  g.phi_fin = phi_fin;
  g.validate();
  return g;
}

MeridianGeometry MeridianGeometry::ellipsoid(double R, double b, double u_fin,
                                             double u_in) {
  MeridianGeometry g;
  g.kind = MeridianKind::ellipsoid;
  g.R = R;
  g.b = b;
  g.phi_in = u_in;
  g.phi_fin = u_fin;
  g.validate();
  return g;
}

MeridianGeometry MeridianGeometry::tabulated(std::vector<double> r,
                                             std::vector<double> z,
                                             double phi_in, double phi_fin) {
  MeridianGeometry g;
  g.kind = MeridianKind::tabulated;
  const double R = *std::max_element(r.begin(), r.end());
  g.table = std::make_shared<TabulatedMeridian>(std::move(r), std::move(z),
                                                phi_in, phi_fin);
  g.R = R;
  g.b = R;
  g.phi_in = phi_in;
  g.phi_fin = phi_fin;
  g.validate();
  return g;
}

void MeridianGeometry::validate() const {
  if (!(R > 0.0)) throw ConfigError("geometry: R must be positive");
  if (kind == MeridianKind::ellipsoid && !(b > 0.0))
    throw ConfigError("geometry: rise semi-diameter b must be positive");
  if (!(phi_in >= 0.0) || !(phi_fin > phi_in))
    throw ConfigError("geometry: invalid parameter range");
  if (kind != MeridianKind::tabulated && phi_fin > std::numbers::pi)
    throw ConfigError("geometry: parameter range exceeds pi");
  if (kind == MeridianKind::tabulated && !table)
    throw ConfigError("geometry: tabulated meridian without samples");
}

void check_phi_range(const MeridianGeometry& g, double phi) {
  const double tol = 1e-12 * std::max(1.0, g.phi_fin);
  if (!(phi >= g.phi_in - tol && phi <= g.phi_fin + tol))
    throw DomainError("meridian parameter " + std::to_string(phi) +
                      " outside [" + std::to_string(g.phi_in) + ", " +
                      std::to_string(g.phi_fin) + "]");
}

}  // namespace dome
