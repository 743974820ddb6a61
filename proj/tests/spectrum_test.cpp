#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "tdreg/spectrum.hpp"

using namespace tdreg;

namespace {

constexpr double kPi = std::numbers::pi;

// independent 1D oracle for the real root of s - 2 - e^{-s}
double bisect_retarded_root(double lo, double hi) {
  auto f = [](double x) { return x - 2.0 - std::exp(-x); };
  REQUIRE(f(lo) < 0.0);
  REQUIRE(f(hi) > 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Quasipolynomial retarded_char() {
  return Quasipolynomial{{0.0, Polynomial{-2.0, 1.0}}, {1.0, Polynomial{-1.0}}};
}

Quasipolynomial example2_closed_loop() {
  // s^2 + 8 s + 10 - s e^{-s}
  return Quasipolynomial{{0.0, Polynomial{10.0, 8.0, 1.0}}, {1.0, Polynomial{0.0, -1.0}}};
}

Quasipolynomial random_qp(std::mt19937& rng) {
  std::uniform_int_distribution<int> deg(0, 2);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_real_distribution<double> delay(0.2, 2.0);
  std::uniform_int_distribution<int> extra(0, 1);
  std::vector<QpTerm> terms;
  Eigen::VectorXd head(deg(rng) + 2);
  for (Eigen::Index k = 0; k < head.size(); ++k) head[k] = coeff(rng);
  if (std::abs(head[head.size() - 1]) < 0.2) head[head.size() - 1] = 1.0;
  terms.push_back({0.0, Polynomial(head)});
  if (extra(rng)) {
    Eigen::VectorXd tail(deg(rng) + 1);
    for (Eigen::Index k = 0; k < tail.size(); ++k) tail[k] = 0.5 * coeff(rng);
    if (!Polynomial(tail).isZero()) terms.push_back({delay(rng), Polynomial(tail)});
  }
  return Quasipolynomial(std::move(terms));
}

int count_in_rect(const RootSet& set, const RegionSpec& r) {
  int n = 0;
  for (const Root& root : set.roots) {
    if (root.s.real() >= r.re_min && root.s.real() <= r.re_max && root.s.imag() >= r.im_min &&
        root.s.imag() <= r.im_max)
      ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("retarded characteristic root against the bisection oracle") {
  const double oracle = bisect_retarded_root(2.0, 2.2);
  CHECK(std::abs(oracle - 2.1200) < 1e-4);

  RegionSpec region{0.0, 3.0, -1.0, 1.0, 0.05, 1e-12, 50};
  const RootSet roots = find_roots(retarded_char(), region);
  REQUIRE(roots.roots.size() == 1);
  CHECK(std::abs(roots.roots[0].s.real() - oracle) < 1e-10);
  CHECK(std::abs(roots.roots[0].s.imag()) < 1e-10);
  CHECK(roots.roots[0].residual < 1e-10);
  CHECK(!roots.grid_too_coarse);
}

TEST_CASE("polynomial roots in the upper half plane") {
  const Quasipolynomial p{{0.0, Polynomial{1.0, 0.0, 1.0}}};  // s^2 + 1
  RegionSpec region{-1.0, 1.0, 0.0, 2.0, 0.05, 1e-12, 50};
  const RootSet roots = find_roots(p, region);
  REQUIRE(roots.roots.size() == 1);
  CHECK(std::abs(roots.roots[0].s - Complex(0.0, 1.0)) < 1e-9);
}

TEST_CASE("stable closed loop has no roots near the imaginary axis strip") {
  RegionSpec region{-0.5, 0.5, 0.0, 100.0, 0.05, 1e-12, 50};
  const RootSet roots = find_roots(example2_closed_loop(), region);
  for (const Root& r : roots.roots) CHECK(r.s.real() < 0.0);
}

TEST_CASE("argument principle counts") {
  RegionSpec square{-1.0, 1.0, -2.0, 2.0, 0.05, 1e-12, 50};
  CHECK(count_roots_argument_principle(Quasipolynomial{{0.0, Polynomial{1.0, 0.0, 1.0}}},
                                       square) == 2);

  RegionSpec band{0.0, 3.0, -1.0, 1.0, 0.05, 1e-12, 50};
  CHECK(count_roots_argument_principle(retarded_char(), band) == 1);

  // multiplicity is counted: (s+1)^3
  const Quasipolynomial cube{{0.0, Polynomial{1.0, 3.0, 3.0, 1.0}}};
  RegionSpec left{-2.0, 0.0, -1.0, 1.0, 0.05, 1e-12, 50};
  CHECK(count_roots_argument_principle(cube, left) == 3);
}

TEST_CASE("boundary roots are rejected") {
  const Quasipolynomial p{{0.0, Polynomial{1.0, 0.0, 1.0}}};
  RegionSpec touching{-1.0, 1.0, 0.0, 1.0, 0.05, 1e-12, 50};  // root at j on the edge
  CHECK_THROWS_AS((void)count_roots_argument_principle(p, touching), BoundaryRoot);
  CHECK_THROWS_AS((void)find_roots(Quasipolynomial{}, touching), ZeroFunction);
  CHECK_THROWS_AS((void)count_roots_argument_principle(Quasipolynomial{}, touching),
                  ZeroFunction);
}

TEST_CASE("located roots agree with the argument principle on random inputs") {
  std::mt19937 rng(8675309);
  int done = 0;
  int attempts = 0;
  while (done < 20 && attempts < 200) {
    ++attempts;
    const Quasipolynomial qp = random_qp(rng);
    RegionSpec region{-3.0, 2.0, -2.0, 2.0, 0.0, 1e-12, 50};
    int counted = 0;
    try {
      counted = count_roots_argument_principle(qp, region);
    } catch (const BoundaryRoot&) {
      continue;  // resample: a root grazes this boundary
    }
    const RootSet located = find_roots(qp, region);
    CHECK(count_in_rect(located, region) == counted);
    ++done;
  }
  CHECK(done == 20);
}

TEST_CASE("conjugate symmetry of real-coefficient spectra") {
  std::mt19937 rng(1311);
  for (int trial = 0; trial < 5; ++trial) {
    const Quasipolynomial qp = random_qp(rng);
    RegionSpec upper{-3.0, 2.0, 0.0, 2.0, 0.0, 1e-12, 50};
    RegionSpec lower{-3.0, 2.0, -2.0, 0.0, 0.0, 1e-12, 50};
    const RootSet up = find_roots(qp, upper);
    const RootSet down = find_roots(qp, lower);

    for (const Root& r : up.roots) {
      if (r.s.imag() <= 1e-9) continue;  // the axis row belongs to both searches
      bool matched = false;
      for (const Root& m : down.roots) {
        if (std::abs(m.s - std::conj(r.s)) < 1e-9 * (1.0 + std::abs(r.s))) matched = true;
      }
      CHECK(matched);
    }
  }
}

TEST_CASE("delay-free roots match the companion-matrix oracle") {
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> deg(2, 4);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = deg(rng);
    Eigen::VectorXd c(n + 1);
    for (int k = 0; k <= n; ++k) c[k] = coeff(rng);
    if (std::abs(c[n]) < 0.2) c[n] = 1.0;
    const Polynomial p(c);

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    companion.diagonal(-1).setOnes();
    for (int k = 0; k < n; ++k) companion(k, n - 1) = -c[k] / c[n];
    const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();

    RegionSpec region{-3.0, 3.0, -3.0, 3.0, 0.1, 1e-12, 50};
    const RootSet located = find_roots(Quasipolynomial(p), region);
    for (Eigen::Index k = 0; k < eigs.size(); ++k) {
      const Complex z = eigs[k];
      if (z.real() < region.re_min + 0.05 || z.real() > region.re_max - 0.05 ||
          z.imag() < region.im_min + 0.05 || z.imag() > region.im_max - 0.05)
        continue;
      bool matched = false;
      for (const Root& r : located.roots)
        if (std::abs(r.s - z) < 1e-8 * (1.0 + std::abs(z))) matched = true;
      CHECK(matched);
    }
  }
}

TEST_CASE("reported residuals are evaluations at the root") {
  RegionSpec region{0.0, 3.0, -1.0, 1.0, 0.05, 1e-12, 50};
  const Quasipolynomial qp = retarded_char();
  const RootSet roots = find_roots(qp, region);
  double max_abs = 0.0;
  for (double re = 0.0; re <= 3.0; re += 0.25)
    for (double im = -1.0; im <= 1.0; im += 0.25)
      max_abs = std::max(max_abs, std::abs(qp.eval(Complex(re, im))));
  for (const Root& r : roots.roots) {
    CHECK(r.residual == doctest::Approx(std::abs(qp.eval(r.s))).epsilon(1e-9));
    CHECK(r.residual <= region.newton_tol * (1.0 + max_abs));
  }
}

TEST_CASE("undersampled cells raise the coarse-grid flag") {
  const Polynomial close_pair{0.26, -1.02, 1.0};  // roots 0.5 and 0.52
  RegionSpec coarse{0.0, 1.0, -0.5, 0.5, 0.3, 1e-12, 50};
  const RootSet bad = find_roots(Quasipolynomial(close_pair), coarse);
  CHECK(bad.grid_too_coarse);
  CHECK(!bad.warnings.empty());

  RegionSpec fine = coarse;
  fine.grid_step = 0.005;
  const RootSet good = find_roots(Quasipolynomial(close_pair), fine);
  CHECK(!good.grid_too_coarse);
  REQUIRE(good.roots.size() == 2);
  CHECK(std::abs(good.roots[0].s.real() - 0.5) < 1e-9);
  CHECK(std::abs(good.roots[1].s.real() - 0.52) < 1e-9);
}

TEST_CASE("default grid step follows the largest delay") {
  CHECK(default_grid_step(Quasipolynomial(Polynomial{1.0, 1.0})) ==
        doctest::Approx(std::min(0.1, kPi / 8.0)));
  const Quasipolynomial slow{{0.0, Polynomial{1.0, 1.0}}, {3.0, Polynomial{1.0}}};
  CHECK(default_grid_step(slow) == doctest::Approx(kPi / 32.0));
}

TEST_CASE("sensitivity spectrum of the retarded example") {
  const DelayRational plant(
      Quasipolynomial(Polynomial{1.0}),
      Quasipolynomial{{0.0, Polynomial{-2.0, 1.0}}, {1.0, Polynomial{-1.0}}});
  const CoprimeFactorization plant_f = factorize_by_shift(plant, 1.0);
  const CoprimeFactorization ctrl_f = factorize_pi(10.0, 10.0, 1.0);

  RegionSpec region{-5.0, 3.0, 0.0, 30.0, 0.05, 1e-12, 50};
  const double oracle = bisect_retarded_root(2.0, 2.2);

  SUBCASE("open-loop poles become sensitivity zeros") {
    const SensitivitySpectrum spec =
        sensitivity_spectrum(plant_f, ctrl_f, FirDelayParameter::zeros(0.05, 4), region);
    bool has_unstable_mirror = false, has_integrator = false;
    for (const Root& z : spec.zeros.roots) {
      if (std::abs(z.s - Complex(oracle, 0.0)) < 1e-8) has_unstable_mirror = true;
      if (std::abs(z.s) < 1e-8) has_integrator = true;
    }
    CHECK(has_unstable_mirror);
    CHECK(has_integrator);
    // the shared (s+1) factor shows up as a coincident pair
    bool coincident_at_minus_one = false;
    for (const Complex& c : spec.coincident)
      if (std::abs(c - Complex(-1.0, 0.0)) < 1e-6) coincident_at_minus_one = true;
    CHECK(coincident_at_minus_one);
  }

  SUBCASE("designed parameter places the harmonic zeros") {
    Eigen::VectorXd gains(5);
    gains << 0.0, -21.3792, 13.2131, -13.2131, 21.3792;
    RegionSpec tall = region;
    tall.im_max = 55.0;  // cover both targeted harmonics
    const SensitivitySpectrum spec =
        sensitivity_spectrum(plant_f, ctrl_f, FirDelayParameter(0.05, gains), tall);
    for (const double target : {8.0 * kPi, 16.0 * kPi}) {
      bool placed = false;
      for (const Root& z : spec.zeros.roots)
        if (std::abs(z.s - Complex(0.0, target)) < 1e-4) placed = true;
      CHECK(placed);
    }
    for (const Root& p : spec.poles.roots) CHECK(p.s.real() < 0.5);
  }

  SUBCASE("mirrored region reports conjugates") {
    RegionSpec both = region;
    both.im_min = -30.0;
    const SensitivitySpectrum spec =
        sensitivity_spectrum(plant_f, ctrl_f, FirDelayParameter::zeros(0.05, 4), both);
    int above = 0, below = 0;
    for (const Root& z : spec.zeros.roots) {
      if (z.s.imag() > 1e-9) ++above;
      if (z.s.imag() < -1e-9) ++below;
    }
    CHECK(above == below);
    CHECK(above > 0);
  }
}

TEST_CASE("factor denominator stability window") {
  const CoprimeFactorization good = factorize_pi(10.0, 10.0, 1.0);
  const FactorStabilityReport ok = verify_factor_stability(good);
  CHECK(ok.stable);
  CHECK(ok.unstable_roots.empty());

  CoprimeFactorization bad;
  bad.n = DelayRational(Polynomial{1.0}, Polynomial{-0.3, 1.0});  // pole at +0.3, in-window
  bad.d = DelayRational::one();
  bad.original = bad.n;
  const FactorStabilityReport report = verify_factor_stability(bad);
  CHECK(!report.stable);
  REQUIRE(!report.unstable_roots.empty());
  CHECK(std::abs(report.unstable_roots[0].s - Complex(0.3, 0.0)) < 1e-8);
  CHECK_THROWS_AS(ensure_stable_factors(bad), UnstableFactor);
}
