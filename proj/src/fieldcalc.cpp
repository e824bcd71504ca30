#include "geomech/fieldcalc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <unordered_map>

#include <fftw3.h>

namespace geomech {

Grid::Grid(int n) : n_(n) {
  if (n < 16 || n % 2 != 0) throw InvalidGrid("grid size must be even and at least 16, got " + std::to_string(n));
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw GridMismatch();
}

ScalarField::ScalarField(Grid g, FieldArray v) : grid(g), values(std::move(v)) {
  if (values.rows() != g.n() || values.cols() != g.n()) throw GridMismatch("sample array does not match grid");
}

ScalarField ScalarField::sample(Grid g, const std::function<double(double, double)>& f) {
  ScalarField out(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) out.values(i, j) = f(g.coord(i), g.coord(j));
  return out;
}

ScalarField ScalarField::constant(Grid g, double c) { return ScalarField(g, FieldArray::Constant(g.n(), g.n(), c)); }

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid, o.grid);
  values += o.values;
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid, o.grid);
  values -= o.values;
  return *this;
}

VectorField2::VectorField2(ScalarField ux, ScalarField uy) : x(std::move(ux)), y(std::move(uy)) {
  require_same_grid(x.grid, y.grid);
}

VectorField2 VectorField2::sample(Grid g, const std::function<double(double, double)>& fx,
                                  const std::function<double(double, double)>& fy) {
  return {ScalarField::sample(g, fx), ScalarField::sample(g, fy)};
}

double VectorField2::max_abs() const { return std::max(x.max_abs(), y.max_abs()); }

double VectorField2::max_speed() const { return (x.values.square() + y.values.square()).sqrt().maxCoeff(); }

VectorField2& VectorField2::operator+=(const VectorField2& o) {
  x += o.x;
  y += o.y;
  return *this;
}

VectorField2& VectorField2::operator-=(const VectorField2& o) {
  x -= o.x;
  y -= o.y;
  return *this;
}

namespace spectral {
namespace {

// One pair of FFTW plans per grid size and thread. Plans are made on owned
// aligned buffers; data is copied through them so callers never need
// FFTW-aligned storage.
struct PlanPair {
  int n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit PlanPair(int size) : n(size) {
    const std::size_t nc = static_cast<std::size_t>(n) * (n / 2 + 1);
    real = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    cplx = fftw_alloc_complex(nc);
    fwd = fftw_plan_dft_r2c_2d(n, n, real, cplx, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_2d(n, n, cplx, real, FFTW_ESTIMATE);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  ~PlanPair() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(cplx);
  }
};

PlanPair& plans_for(int n) {
  thread_local std::unordered_map<int, std::unique_ptr<PlanPair>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<PlanPair>(n);
  return *slot;
}

}  // namespace

static_assert(sizeof(std::complex<double>) == sizeof(fftw_complex));

Spectrum forward(const ScalarField& f) {
  const int n = f.grid.n();
  PlanPair& p = plans_for(n);
  std::memcpy(p.real, f.values.data(), sizeof(double) * n * n);
  fftw_execute(p.fwd);
  Spectrum out(n, n / 2 + 1);
  std::memcpy(static_cast<void*>(out.data()), p.cplx, sizeof(fftw_complex) * n * (n / 2 + 1));
  return out;
}

ScalarField inverse(const Grid& g, const Spectrum& s) {
  const int n = g.n();
  if (s.rows() != n || s.cols() != n / 2 + 1) throw GridMismatch("spectrum does not match grid");
  PlanPair& p = plans_for(n);
  std::memcpy(p.cplx, static_cast<const void*>(s.data()), sizeof(fftw_complex) * n * (n / 2 + 1));
  fftw_execute(p.inv);
  ScalarField out(g);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (Eigen::Index k = 0; k < out.values.size(); ++k) out.values.data()[k] = p.real[k] * scale;
  return out;
}

void band_limit(Spectrum& s, int n, int limit) {
  for (int i = 0; i < n; ++i) {
    const int kx = std::abs(wavenumber_x(n, i));
    for (int j = 0; j <= n / 2; ++j) {
      if (kx > limit || j > limit || i == n / 2 || j == n / 2) s(i, j) = 0.0;
    }
  }
}

int max_active_mode(const Spectrum& s, int n, double tol) {
  const double peak = s.abs().maxCoeff();
  int top = 0;
  if (peak == 0.0) return 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n / 2; ++j)
      if (std::abs(s(i, j)) > tol * peak) top = std::max({top, std::abs(wavenumber_x(n, i)), j});
  return top;
}

}  // namespace spectral

namespace {

using spectral::deriv_kx;
using spectral::deriv_ky;

constexpr std::complex<double> kI(0.0, 1.0);

Spectrum differentiate(const Spectrum& s, int n, Axis axis) {
  Spectrum out(s.rows(), s.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n / 2; ++j) {
      const double k = axis == Axis::X ? deriv_kx(n, i) : deriv_ky(n, j);
      out(i, j) = kI * k * s(i, j);
    }
  return out;
}

ScalarField physical_product(const ScalarField& a, const ScalarField& b) {
  return ScalarField(a.grid, a.values * b.values);
}

ScalarField truncated(const ScalarField& f) {
  Spectrum s = spectral::forward(f);
  spectral::dealias(s, f.grid.n());
  return spectral::inverse(f.grid, s);
}

}  // namespace

ScalarField ddx(const ScalarField& f, Axis axis) {
  return spectral::inverse(f.grid, differentiate(spectral::forward(f), f.grid.n(), axis));
}

ScalarField laplacian(const ScalarField& f) {
  const int n = f.grid.n();
  Spectrum s = spectral::forward(f);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n / 2; ++j) {
      const double kx = deriv_kx(n, i);
      const double ky = deriv_ky(n, j);
      s(i, j) *= -(kx * kx + ky * ky);
    }
  return spectral::inverse(f.grid, s);
}

ScalarField divergence(const VectorField2& v) {
  const int n = v.grid().n();
  Spectrum sx = spectral::forward(v.x);
  const Spectrum sy = spectral::forward(v.y);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n / 2; ++j) sx(i, j) = kI * (deriv_kx(n, i) * sx(i, j) + deriv_ky(n, j) * sy(i, j));
  return spectral::inverse(v.grid(), sx);
}

ScalarField curl(const VectorField2& v) {
  const int n = v.grid().n();
  const Spectrum sx = spectral::forward(v.x);
  Spectrum sy = spectral::forward(v.y);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n / 2; ++j) sy(i, j) = kI * (deriv_kx(n, i) * sy(i, j) - deriv_ky(n, j) * sx(i, j));
  return spectral::inverse(v.grid(), sy);
}

VectorField2 gradient(const ScalarField& f) {
  const Spectrum s = spectral::forward(f);
  const int n = f.grid.n();
  return {spectral::inverse(f.grid, differentiate(s, n, Axis::X)),
          spectral::inverse(f.grid, differentiate(s, n, Axis::Y))};
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  return truncated(physical_product(truncated(a), truncated(b)));
}

ScalarField dot(const VectorField2& a, const VectorField2& b) {
  require_same_grid(a.grid(), b.grid());
  const ScalarField ax = truncated(a.x), ay = truncated(a.y);
  const ScalarField bx = truncated(b.x), by = truncated(b.y);
  return truncated(ScalarField(a.grid(), ax.values * bx.values + ay.values * by.values));
}

namespace {

// (v . grad) u with every input truncated to the 2/3 band and the result
// truncated again, so retained modes are alias-free.
ScalarField advective(const ScalarField& vx, const ScalarField& vy, const Spectrum& u_hat) {
  const Grid& g = vx.grid;
  const int n = g.n();
  Spectrum uh = u_hat;
  spectral::dealias(uh, n);
  const ScalarField ux = spectral::inverse(g, differentiate(uh, n, Axis::X));
  const ScalarField uy = spectral::inverse(g, differentiate(uh, n, Axis::Y));
  return truncated(ScalarField(g, vx.values * ux.values + vy.values * uy.values));
}

}  // namespace

VectorField2 covariant_derivative(const VectorField2& v, const VectorField2& u) {
  require_same_grid(v.grid(), u.grid());
  const ScalarField vx = truncated(v.x), vy = truncated(v.y);
  return {advective(vx, vy, spectral::forward(u.x)), advective(vx, vy, spectral::forward(u.y))};
}

VectorField2 vf_bracket(const VectorField2& u, const VectorField2& v) {
  // (Du)v - (Dv)u = nabla_v u - nabla_u v
  return covariant_derivative(v, u) - covariant_derivative(u, v);
}

double inner_l2(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  return (a.values * b.values).mean() * kTorusArea;
}

double inner_l2(const VectorField2& a, const VectorField2& b) {
  require_same_grid(a.grid(), b.grid());
  return (a.x.values * b.x.values + a.y.values * b.y.values).mean() * kTorusArea;
}

HelmholtzParts helmholtz_decompose(const VectorField2& u) {
  const Grid& g = u.grid();
  const int n = g.n();
  const Spectrum ux = spectral::forward(u.x);
  const Spectrum uy = spectral::forward(u.y);
  Spectrum gx = Spectrum::Zero(ux.rows(), ux.cols());
  Spectrum gy = gx;
  Spectrum f = gx;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n / 2; ++j) {
      const double kx = deriv_kx(n, i);
      const double ky = deriv_ky(n, j);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const std::complex<double> kdotu = kx * ux(i, j) + ky * uy(i, j);
      gx(i, j) = kx * kdotu / k2;
      gy(i, j) = ky * kdotu / k2;
      f(i, j) = -kI * kdotu / k2;
    }
  VectorField2 grad(spectral::inverse(g, gx), spectral::inverse(g, gy));
  VectorField2 v = u - grad;
  return {std::move(v), std::move(grad), spectral::inverse(g, f)};
}

VectorField2 leray_project(const VectorField2& u) { return helmholtz_decompose(u).divfree; }

ScalarField solve_poisson(const ScalarField& rhs) {
  const int n = rhs.grid.n();
  Spectrum s = spectral::forward(rhs);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n / 2; ++j) {
      const double kx = deriv_kx(n, i);
      const double ky = deriv_ky(n, j);
      const double k2 = kx * kx + ky * ky;
      s(i, j) = k2 == 0.0 ? std::complex<double>(0.0) : -s(i, j) / k2;
    }
  return spectral::inverse(rhs.grid, s);
}

ScalarField random_scalar_field(const Grid& g, int max_mode, std::mt19937_64& rng) {
  const int n = g.n();
  if (max_mode < 0 || max_mode >= n / 2) throw BandLimitExceeded("random field band limit out of range");
  std::normal_distribution<double> normal(0.0, 1.0);
  Spectrum s = Spectrum::Zero(n, n / 2 + 1);
  // Draw in a fixed order over the retained box so outputs depend only on the seed.
  for (int kx = -max_mode; kx <= max_mode; ++kx)
    for (int ky = 0; ky <= max_mode; ++ky) {
      const double re = normal(rng);
      const double im = normal(rng);
      if (kx == 0 && ky == 0) continue;
      if (ky == 0 && kx < 0) continue;  // conjugate of a +kx mode
      const double amp = 1.0 / (1.0 + kx * kx + ky * ky);
      const int i = kx >= 0 ? kx : kx + n;
      s(i, ky) = std::complex<double>(re, im) * amp;
      if (ky == 0) s((n - kx) % n, 0) = std::conj(s(i, 0));
    }
  // unit-variance-ish scaling independent of n
  s *= static_cast<double>(n) * n / 2.0;
  return spectral::inverse(g, s);
}

VectorField2 random_vector_field(const Grid& g, int max_mode, std::mt19937_64& rng) {
  VectorField2 v(random_scalar_field(g, max_mode, rng), random_scalar_field(g, max_mode, rng));
  std::normal_distribution<double> normal(0.0, 1.0);
  v.x.values += 0.1 * normal(rng);
  v.y.values += 0.1 * normal(rng);
  return v;
}

}  // namespace geomech
