#include "tdreg/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Core>

namespace tdreg {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct Grid {
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;
  double re0 = 0.0, im0 = 0.0;
  Eigen::MatrixXcd value;
  double max_abs = 0.0;

  Complex point(double i, double j) const { return {re0 + i * hx, im0 + j * hy}; }
};

// Per term, the exponential along a row of constant Im(s) changes by the
// real factor e^{-hx*theta} per column; only the row start needs a full exp.
Grid evaluate_grid(const Quasipolynomial& qp, const RegionSpec& r, double step) {
  Grid g;
  g.re0 = r.re_min;
  g.im0 = r.im_min;
  const double wre = r.re_max - r.re_min;
  const double wim = r.im_max - r.im_min;
  g.nx = std::max(2, static_cast<int>(std::ceil(wre / step)) + 1);
  g.ny = std::max(2, static_cast<int>(std::ceil(wim / step)) + 1);
  g.hx = wre / (g.nx - 1);
  g.hy = wim / (g.ny - 1);

  // Real coefficients make Im(qp) vanish identically on the real axis, so a
  // node row on (or rounding-level close to) the axis degenerates the
  // imaginary-part contour and axis roots lose their seeds. Shift the rows
  // half a cell so the axis crosses cell interiors transversally.
  const double rows_to_axis = (0.0 - g.im0) / g.hy;
  if (std::abs(rows_to_axis - std::round(rows_to_axis)) < 0.3 &&
      std::round(rows_to_axis) >= -1.0 && std::round(rows_to_axis) <= static_cast<double>(g.ny)) {
    g.im0 -= 0.5 * g.hy;
    g.ny += 1;
  }
  g.value = Eigen::MatrixXcd::Zero(g.nx, g.ny);

  for (const QpTerm& t : qp.terms()) {
    const double decay = std::exp(-g.hx * t.delay);
    for (int j = 0; j < g.ny; ++j) {
      const double im = g.im0 + j * g.hy;
      Complex e = (t.delay == 0.0) ? Complex(1.0, 0.0)
                                   : std::exp(-Complex(g.re0, im) * t.delay);
      for (int i = 0; i < g.nx; ++i) {
        g.value(i, j) += t.poly(Complex(g.re0 + i * g.hx, im)) * e;
        e *= decay;
      }
    }
  }
  g.max_abs = g.value.cwiseAbs().maxCoeff();
  return g;
}

struct Seg {
  double x0, y0, x1, y1;  // cell-local coordinates in [0,1]^2
};

// Zero-level segments of a scalar field given at the four cell corners
// v00=(0,0), v10=(1,0), v11=(1,1), v01=(0,1). Saddles are disambiguated by
// the corner average. Returns the number of segments written (0..2).
int marching_segments(double v00, double v10, double v11, double v01, Seg out[2]) {
  const bool p00 = v00 >= 0.0, p10 = v10 >= 0.0, p11 = v11 >= 0.0, p01 = v01 >= 0.0;
  const int mask = (p00 ? 1 : 0) | (p10 ? 2 : 0) | (p11 ? 4 : 0) | (p01 ? 8 : 0);
  if (mask == 0 || mask == 15) return 0;

  const double tb = (v00 != v10) ? v00 / (v00 - v10) : 0.5;
  const double tr = (v10 != v11) ? v10 / (v10 - v11) : 0.5;
  const double tt = (v11 != v01) ? v11 / (v11 - v01) : 0.5;
  const double tl = (v01 != v00) ? v01 / (v01 - v00) : 0.5;
  const double bx = tb, by = 0.0;        // bottom edge crossing
  const double rx = 1.0, ry = tr;        // right edge
  const double txx = 1.0 - tt, ty = 1.0; // top edge
  const double lx = 0.0, ly = 1.0 - tl;  // left edge

  switch (mask) {
    case 1:
    case 14:
      out[0] = {bx, by, lx, ly};
      return 1;
    case 2:
    case 13:
      out[0] = {bx, by, rx, ry};
      return 1;
    case 4:
    case 11:
      out[0] = {rx, ry, txx, ty};
      return 1;
    case 8:
    case 7:
      out[0] = {txx, ty, lx, ly};
      return 1;
    case 3:
    case 12:
      out[0] = {lx, ly, rx, ry};
      return 1;
    case 6:
    case 9:
      out[0] = {bx, by, txx, ty};
      return 1;
    case 5: {  // corners (0,0) and (1,1) positive
      const double center = 0.25 * (v00 + v10 + v11 + v01);
      if (center >= 0.0) {
        out[0] = {bx, by, rx, ry};
        out[1] = {txx, ty, lx, ly};
      } else {
        out[0] = {bx, by, lx, ly};
        out[1] = {rx, ry, txx, ty};
      }
      return 2;
    }
    case 10: {  // corners (1,0) and (0,1) positive
      const double center = 0.25 * (v00 + v10 + v11 + v01);
      if (center >= 0.0) {
        out[0] = {bx, by, lx, ly};
        out[1] = {rx, ry, txx, ty};
      } else {
        out[0] = {bx, by, rx, ry};
        out[1] = {txx, ty, lx, ly};
      }
      return 2;
    }
    default:
      return 0;
  }
}

// Intersection of two cell-local segments, inclusive of a 25% margin around
// the cell. Near-parallel pairs fall back to the joint midpoint; the seed
// is only a Newton starting point.
bool intersect_segments(const Seg& a, const Seg& b, double& px, double& py) {
  const double dax = a.x1 - a.x0, day = a.y1 - a.y0;
  const double dbx = b.x1 - b.x0, dby = b.y1 - b.y0;
  const double det = dax * dby - day * dbx;
  if (std::abs(det) < 1e-12) {
    px = 0.25 * (a.x0 + a.x1 + b.x0 + b.x1);
    py = 0.25 * (a.y0 + a.y1 + b.y0 + b.y1);
    return true;
  }
  const double rx = b.x0 - a.x0, ry = b.y0 - a.y0;
  const double t = (rx * dby - ry * dbx) / det;
  const double u = (rx * day - ry * dax) / det;
  if (t < -0.25 || t > 1.25 || u < -0.25 || u > 1.25) return false;
  px = a.x0 + t * dax;
  py = a.y0 + t * day;
  return true;
}

struct Polished {
  Complex s;
  double residual = 0.0;
  bool ok = false;
};

Polished newton_polish(const Quasipolynomial& qp, const Quasipolynomial& dqp, Complex seed,
                       double re_lo, double re_hi, double im_lo, double im_hi,
                       double accept_tol, int max_iters) {
  auto inside = [&](Complex z) {
    return z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo && z.imag() <= im_hi;
  };
  Complex s = seed;
  for (int it = 0; it < max_iters; ++it) {
    const Complex f = qp.eval(s);
    if (!finite(f)) return {};
    const Complex fp = dqp.eval(s);
    if (!finite(fp) || fp == Complex(0.0, 0.0)) break;
    const Complex delta = f / fp;
    const Complex snew = s - delta;
    if (!inside(snew)) return {};
    s = snew;
    if (std::abs(delta) <= 1e-10 * (1.0 + std::abs(s))) {
      // stagnated; one last step tightens the residual for simple roots
      const Complex f2 = qp.eval(s);
      const Complex fp2 = dqp.eval(s);
      if (finite(f2) && finite(fp2) && fp2 != Complex(0.0, 0.0)) {
        const Complex s2 = s - f2 / fp2;
        if (inside(s2) && std::abs(qp.eval(s2)) <= std::abs(f2)) s = s2;
      }
      break;
    }
  }
  const double res = std::abs(qp.eval(s));
  return {s, res, res <= accept_tol};
}

void validate_region(const RegionSpec& r) {
  if (!(r.re_min < r.re_max)) throw Error("region requires re_min < re_max");
  if (!(r.im_min <= r.im_max)) throw Error("region requires im_min <= im_max");
  if (r.grid_step < 0.0) throw Error("grid step must be positive");
  if (!(r.newton_tol > 0.0)) throw Error("newton tolerance must be positive");
  if (r.max_newton_iters < 1) throw Error("max_newton_iters must be at least 1");
}

}  // namespace

double default_grid_step(const Quasipolynomial& qp) {
  return std::min(0.1, kPi / (8.0 * (1.0 + qp.maxDelay())));
}

RootSet find_roots(const Quasipolynomial& qp, RegionSpec region) {
  if (qp.isZero()) throw ZeroFunction("find_roots: input is identically zero");
  validate_region(region);
  const double step = region.grid_step > 0.0 ? region.grid_step : default_grid_step(qp);
  region.grid_step = step;
  if (region.im_min == region.im_max) {  // degenerate strip: widen to one cell row
    region.im_min -= 0.5 * step;
    region.im_max += 0.5 * step;
  }

  const Grid grid = evaluate_grid(qp, region, step);
  const double accept_tol = region.newton_tol * (1.0 + grid.max_abs);
  const Quasipolynomial dqp = qp.derivative();

  const double re_lo = region.re_min - step, re_hi = region.re_max + step;
  const double im_lo = region.im_min - step, im_hi = region.im_max + step;

  std::vector<Polished> candidates;
  Seg re_segs[2], im_segs[2];
  for (int i = 0; i + 1 < grid.nx; ++i) {
    for (int j = 0; j + 1 < grid.ny; ++j) {
      const Complex f00 = grid.value(i, j), f10 = grid.value(i + 1, j);
      const Complex f11 = grid.value(i + 1, j + 1), f01 = grid.value(i, j + 1);
      const int nre =
          marching_segments(f00.real(), f10.real(), f11.real(), f01.real(), re_segs);
      if (nre == 0) continue;
      const int nim =
          marching_segments(f00.imag(), f10.imag(), f11.imag(), f01.imag(), im_segs);
      if (nim == 0) continue;
      for (int a = 0; a < nre; ++a) {
        for (int b = 0; b < nim; ++b) {
          double px, py;
          if (!intersect_segments(re_segs[a], im_segs[b], px, py)) continue;
          const Complex seed = grid.point(i + px, j + py);
          Polished p = newton_polish(qp, dqp, seed, re_lo, re_hi, im_lo, im_hi, accept_tol,
                                     region.max_newton_iters);
          if (p.ok) candidates.push_back(p);
        }
      }
    }
  }

  // roots this close to the axis are real for real coefficients
  for (Polished& c : candidates) {
    if (c.s.imag() != 0.0 && std::abs(c.s.imag()) <= 1e-12 * (1.0 + std::abs(c.s)))
      c.s = Complex(c.s.real(), 0.0);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Polished& a, const Polished& b) { return a.residual < b.residual; });
  std::vector<Root> kept;
  for (const Polished& c : candidates) {
    bool duplicate = false;
    for (const Root& r : kept) {
      if (std::abs(r.s - c.s) <= 1e-7 * (1.0 + std::abs(c.s))) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back({c.s, c.residual});
  }

  RootSet out;
  out.region = region;
  out.roots = std::move(kept);
  std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
    if (a.s.imag() != b.s.imag()) return a.s.imag() < b.s.imag();
    return a.s.real() < b.s.real();
  });

  // more than one distinct root in a cell means the grid undersamples
  std::vector<std::pair<long, long>> cells;
  for (const Root& r : out.roots) {
    const long ci = std::lround(std::floor((r.s.real() - grid.re0) / grid.hx));
    const long cj = std::lround(std::floor((r.s.imag() - grid.im0) / grid.hy));
    cells.emplace_back(ci, cj);
  }
  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      if (cells[a] == cells[b]) {
        out.grid_too_coarse = true;
        out.warnings.push_back(
            "grid cell near (" + std::to_string(out.roots[a].s.real()) + ", " +
            std::to_string(out.roots[a].s.imag()) +
            ") holds more than one root; halve grid_step (multiple roots cluster)");
      }
    }
  }
  return out;
}

namespace {

double winding_increment(const Quasipolynomial& qp, Complex z0, Complex z1, Complex f0,
                         Complex f1, double floor_abs, int depth) {
  const double d = std::arg(f1 / f0);
  if (std::abs(d) <= kPi / 2.0) return d;
  if (depth >= 48)
    throw BoundaryRoot("boundary phase variation did not resolve under subdivision");
  const Complex zm = 0.5 * (z0 + z1);
  const Complex fm = qp.eval(zm);
  if (!(std::abs(fm) > floor_abs))
    throw BoundaryRoot("quasipolynomial vanishes on the region boundary");
  return winding_increment(qp, z0, zm, f0, fm, floor_abs, depth + 1) +
         winding_increment(qp, zm, z1, fm, f1, floor_abs, depth + 1);
}

}  // namespace

int count_roots_argument_principle(const Quasipolynomial& qp, const RegionSpec& region,
                                   int boundary_samples) {
  if (qp.isZero()) throw ZeroFunction("argument principle: input is identically zero");
  validate_region(region);
  if (!(region.im_min < region.im_max))
    throw Error("argument principle requires a two-dimensional region");

  const Complex c0(region.re_min, region.im_min);
  const Complex c1(region.re_max, region.im_min);
  const Complex c2(region.re_max, region.im_max);
  const Complex c3(region.re_min, region.im_max);
  const Complex corners[5] = {c0, c1, c2, c3, c0};

  const double step = region.grid_step > 0.0 ? region.grid_step : default_grid_step(qp);
  std::vector<Complex> pts;
  for (int e = 0; e < 4; ++e) {
    const double len = std::abs(corners[e + 1] - corners[e]);
    const int n = boundary_samples > 0
                      ? boundary_samples
                      : std::max(64, static_cast<int>(std::ceil(4.0 * len / step)));
    for (int k = 0; k < n; ++k)
      pts.push_back(corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(k) / n));
  }
  pts.push_back(c0);

  std::vector<Complex> vals(pts.size());
  double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    vals[k] = qp.eval(pts[k]);
    const double a = std::abs(vals[k]);
    vmin = std::min(vmin, a);
    vmax = std::max(vmax, a);
  }
  if (!(vmin > 1e-8 * vmax))
    throw BoundaryRoot("quasipolynomial is too small on the region boundary");

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    total += winding_increment(qp, pts[k], pts[k + 1], vals[k], vals[k + 1], 1e-8 * vmax, 0);

  const double turns = total / (2.0 * kPi);
  const long count = std::lround(turns);
  if (std::abs(turns - static_cast<double>(count)) > 0.25)
    throw BoundaryRoot("winding number did not settle to an integer");
  return static_cast<int>(count);
}

SensitivitySpectrum sensitivity_spectrum(const CoprimeFactorization& plant_f,
                                         const CoprimeFactorization& ctrl_f,
                                         const FirDelayParameter& qm,
                                         RegionSpec region) {
  validate_region(region);
  if (region.im_max < 0.0)
    throw Error("sensitivity spectrum expects im_max >= 0 (upper-half convention)");
  const DelayRational sens = assemble_sensitivity(plant_f, ctrl_f, qm);

  RegionSpec upper = region;
  const bool mirror = region.im_min < 0.0;
  if (mirror) upper.im_min = 0.0;

  auto mirrored = [&](RootSet set) {
    if (mirror) {
      const std::size_t n = set.roots.size();
      for (std::size_t k = 0; k < n; ++k) {
        const Root& r = set.roots[k];
        if (r.s.imag() > 1e-12 && -r.s.imag() >= region.im_min - set.region.grid_step)
          set.roots.push_back({std::conj(r.s), r.residual});
      }
      std::sort(set.roots.begin(), set.roots.end(), [](const Root& a, const Root& b) {
        if (a.s.imag() != b.s.imag()) return a.s.imag() < b.s.imag();
        return a.s.real() < b.s.real();
      });
      set.region.im_min = region.im_min;
    }
    return set;
  };

  SensitivitySpectrum out;
  out.zeros = mirrored(find_roots(sens.num(), upper));
  out.poles = mirrored(find_roots(sens.den(), upper));
  for (const Root& z : out.zeros.roots) {
    for (const Root& p : out.poles.roots) {
      if (std::abs(z.s - p.s) <= kCoincidenceTol) {
        out.coincident.push_back(z.s);
        break;
      }
    }
  }
  return out;
}

FactorStabilityReport verify_factor_stability(const CoprimeFactorization& f, RegionSpec window) {
  FactorStabilityReport report;
  for (const Quasipolynomial* den : {&f.n.den(), &f.d.den()}) {
    const RootSet roots = find_roots(*den, window);
    for (const Root& r : roots.roots) {
      if (r.s.real() >= 0.0) {
        report.stable = false;
        report.unstable_roots.push_back(r);
      }
    }
  }
  return report;
}

void ensure_stable_factors(const CoprimeFactorization& f, RegionSpec window) {
  const FactorStabilityReport report = verify_factor_stability(f, window);
  if (!report.stable) {
    const Complex s = report.unstable_roots.front().s;
    throw UnstableFactor("factor denominator has a root with Re >= 0 near (" +
                         std::to_string(s.real()) + ", " + std::to_string(s.imag()) + ")");
  }
}

}  // namespace tdreg
