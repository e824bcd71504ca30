#pragma once

// Periodic field calculus on the flat torus [0, 2pi)^2.
//
// Fields are sampled at (i h, j h), h = 2pi/n, stored row-major with the row
// index running along x. Derivatives are spectral; the derivative symbol has
// its Nyquist components zeroed so odd derivatives of real fields stay real.
// Every product of fields is dealiased with the 2/3 rule.

#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "geomech/errors.hpp"

namespace geomech {

using FieldArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Spectrum = Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kTorusArea = kTwoPi * kTwoPi;

class Grid {
 public:
  explicit Grid(int n);

  int n() const { return n_; }
  double spacing() const { return kTwoPi / n_; }
  double coord(int i) const { return i * spacing(); }
  /// Largest retained mode K under the 2/3 rule (3K < n).
  int dealias_limit() const { return (n_ - 1) / 3; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
};

enum class Axis { X, Y };

struct ScalarField {
  Grid grid;
  FieldArray values;

  explicit ScalarField(Grid g) : grid(g), values(FieldArray::Zero(g.n(), g.n())) {}
  ScalarField(Grid g, FieldArray v);

  static ScalarField sample(Grid g, const std::function<double(double, double)>& f);
  static ScalarField constant(Grid g, double c);

  double max_abs() const { return values.abs().maxCoeff(); }
  double mean() const { return values.mean(); }
  /// Integral over the torus by the periodic trapezoid rule.
  double integral() const { return values.mean() * kTorusArea; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s) {
    values *= s;
    return *this;
  }
  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
};

struct VectorField2 {
  ScalarField x;
  ScalarField y;

  explicit VectorField2(Grid g) : x(g), y(g) {}
  VectorField2(ScalarField ux, ScalarField uy);

  static VectorField2 sample(Grid g, const std::function<double(double, double)>& fx,
                             const std::function<double(double, double)>& fy);

  const Grid& grid() const { return x.grid; }
  double max_abs() const;
  /// Largest pointwise speed |v(x)|.
  double max_speed() const;

  VectorField2& operator+=(const VectorField2& o);
  VectorField2& operator-=(const VectorField2& o);
  VectorField2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend VectorField2 operator+(VectorField2 a, const VectorField2& b) { return a += b; }
  friend VectorField2 operator-(VectorField2 a, const VectorField2& b) { return a -= b; }
  friend VectorField2 operator*(double s, VectorField2 a) { return a *= s; }
};

// --- transforms -------------------------------------------------------------

namespace spectral {

/// Forward real-to-complex transform, n x (n/2+1), unnormalized.
Spectrum forward(const ScalarField& f);
/// Inverse transform including the 1/n^2 normalization.
ScalarField inverse(const Grid& g, const Spectrum& s);

/// Signed wavenumber of row i (x direction); the Nyquist row maps to +n/2.
inline int wavenumber_x(int n, int i) { return i <= n / 2 ? i : i - n; }
/// Wavenumber of column j (y direction, half spectrum).
inline int wavenumber_y(int /*n*/, int j) { return j; }
/// Derivative symbols: Nyquist components zeroed.
inline double deriv_kx(int n, int i) { return i == n / 2 ? 0.0 : static_cast<double>(wavenumber_x(n, i)); }
inline double deriv_ky(int n, int j) { return j == n / 2 ? 0.0 : static_cast<double>(j); }

/// Zero all modes with max(|kx|,|ky|) > limit, including Nyquist rows.
void band_limit(Spectrum& s, int n, int limit);
/// 2/3-rule truncation.
inline void dealias(Spectrum& s, int n) { band_limit(s, n, (n - 1) / 3); }

/// Largest max(|kx|,|ky|) carrying a coefficient above tol (relative to the peak).
int max_active_mode(const Spectrum& s, int n, double tol = 1e-12);

}  // namespace spectral

// --- differential operators -------------------------------------------------

ScalarField ddx(const ScalarField& f, Axis axis);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const VectorField2& v);
/// Scalar curl dx v^y - dy v^x.
ScalarField curl(const VectorField2& v);
VectorField2 gradient(const ScalarField& f);

/// Dealiased pointwise product.
ScalarField product(const ScalarField& a, const ScalarField& b);
/// Dealiased pointwise dot product a.b.
ScalarField dot(const VectorField2& a, const VectorField2& b);

/// nabla_v u = (v . grad) u; the Christoffel symbols of the flat torus vanish.
VectorField2 covariant_derivative(const VectorField2& v, const VectorField2& u);
/// [u, v] = (Du) v - (Dv) u.
VectorField2 vf_bracket(const VectorField2& u, const VectorField2& v);

double inner_l2(const ScalarField& a, const ScalarField& b);
double inner_l2(const VectorField2& a, const VectorField2& b);

struct HelmholtzParts {
  VectorField2 divfree;
  VectorField2 gradient;
  ScalarField potential;  // zero mean; defined up to a constant
};

/// u = v + grad f with div v = 0 and <v, grad f> = 0. The mean mode (and any
/// mode the derivative symbol annihilates) goes to v.
HelmholtzParts helmholtz_decompose(const VectorField2& u);
VectorField2 leray_project(const VectorField2& u);

/// Solve laplacian(f) = rhs for zero-mean f; modes the Laplacian kills are dropped.
ScalarField solve_poisson(const ScalarField& rhs);

// --- random band-limited fields ------------------------------------------------

/// Smooth random field with max(|kx|,|ky|) <= max_mode, zero mean,
/// coefficients ~ N(0,1) / (1 + |k|^2).
ScalarField random_scalar_field(const Grid& g, int max_mode, std::mt19937_64& rng);
/// Two independent random components, each offset by a small random constant.
VectorField2 random_vector_field(const Grid& g, int max_mode, std::mt19937_64& rng);

void require_same_grid(const Grid& a, const Grid& b);

}  // namespace geomech
