// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "helpers.hpp"

using namespace repgrowth;
using testutil::basis;
using testutil::iso2;
using testutil::iso2_phase;

namespace {

int failures = 0;

void line(int criterion, bool pass, const std::string& text) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, text.c_str());
  if (!pass) ++failures;
}

struct Built {
  NormalizedSystem norm;
  TwinSystem tw;
  CouplingMaps e;
  TransferOperator t;
  std::string label;

  Built(const MatrixSystem& sys, std::string name)
      : norm(normalize(sys)), tw(twin(norm)), e(coupling(norm, tw)), t(norm, tw, e),
        label(std::move(name)) {}
};

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

}  // namespace

int main() {
  GeneratorAlphabet alphabet = testutil::ab_alphabet();

  // Shared test systems: the isotropic endpoint plus random irreducible ones.
  std::vector<Built> systems;
  systems.emplace_back(iso2(), "iso2");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MatrixSystem sys = random_system(alphabet, testutil::dims_for_seed(seed), seed);
    if (!is_irreducible(sys, 8, seed).irreducible()) {
      line(1, false, "random system seed " + std::to_string(seed) + " found reducible");
      return 1;
    }
    systems.emplace_back(sys, "random seed " + std::to_string(seed));
  }

  // 1. Transfer-matrix sphere sums equal the brute-force Cayley-tree sums.
  {
    auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const Built& s : systems) {
      Vector va = basis(s.norm.system.dim(0));
      Vector vb = basis(s.norm.system.dim(2));
      for (int big_j = 1; big_j <= 7; ++big_j)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            double lhs = sphere_sum(s.t, s.norm, big_j, c, d, 0, va, 2, vb).value;
            double rhs = oracle::sphere_sum_brute(s.norm, s.e, big_j, c, d, 0, va, 2, vb);
            worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + rhs));
          }
    }
    double elapsed = seconds_since(start);
    line(1, worst <= 1e-9 && elapsed < 30.0,
         fmt("sphere-sum identity, 6 systems, J <= 7: worst rel dev %.2e in %.1f s", worst,
             elapsed));
  }

  // 2. Three evaluation routes for matrix coefficients agree.
  {
    double worst = 0.0;
    int words = 0;
    for (const Built& s : systems) {
      SeededRng rng(997 + words);
      Vector va = rng.complex_gaussian_vector(s.norm.system.dim(0));
      Vector vb = rng.complex_gaussian_vector(s.norm.system.dim(2));
      for (int trial = 0; trial < 167; ++trial) {
        int len = 1 + rng.uniform_int(5);
        std::vector<int> letters;
        for (int j = 0; j < len; ++j) {
          int l = rng.uniform_int(4);
          while (!letters.empty() && l == alphabet.inverse(letters.back()))
            l = rng.uniform_int(4);
          letters.push_back(l);
        }
        ReducedWord w{std::move(letters)};
        Complex direct = oracle::coefficient_direct(s.norm, s.e, w, 0, va, 2, vb);
        Complex recursive = oracle::coefficient_recursive(s.norm, s.e, w, 0, va, 2, vb);
        Complex first =
            oracle::coefficient_first_principles(s.norm, w, 0, va, 2, vb, w.length() + 1);
        double scale = 1.0 + std::abs(direct);
        worst = std::max(worst, std::abs(direct - recursive) / scale);
        worst = std::max(worst, std::abs(direct - first) / scale);
        ++words;
      }
    }
    line(2, worst <= 1e-9 && words >= 1000,
         fmt("three-way coefficient agreement on %.0f words: worst rel dev %.2e",
             static_cast<double>(words), worst));
  }

  // 3. Isotropic endpoint: fitted exponent 3.00 +- 0.05, profile {3,1},
  //    multiplicity 4.
  {
    auto start = std::chrono::steady_clock::now();
    const Built& s = systems[0];
    Vector one = basis(1);
    SweepResult sweep = run_sweep(s.t, s.norm, 1e-3, 1e-1, 20, 0, one, 2, one);
    SpectralReport report = classify_growth(s.norm);
    double elapsed = seconds_since(start);
    bool pass = std::abs(sweep.fitted_alpha - 3.0) <= 0.05 &&
                report.jordan.block_sizes == std::vector<int>{3, 1} &&
                report.multiplicity_one == 4 && elapsed < 5.0;
    line(3, pass,
         fmt("isotropic endpoint: fitted alpha %.4f, multiplicity %.0f, in %.2f s",
             sweep.fitted_alpha, static_cast<double>(report.multiplicity_one), elapsed));
  }

  // 4. Quadratic-regime constant at eps = 1e-3 within 2%. The system is the
  //    first seed with dims (2,2,1,1) passing the E0 filter.
  {
    bool done = false;
    for (std::uint64_t seed = 1; seed <= 20 && !done; ++seed) {
      MatrixSystem sys = random_system(alphabet, {2, 2, 1, 1}, seed);
      if (!is_irreducible(sys, 8, seed).irreducible()) continue;
      Built s(sys, "criterion-4");
      if (equivalence_maps(s.norm.system, s.tw.system)) continue;
      DefectMaps defect = q_maps(s.norm, s.tw, s.e, s.t);
      EZeroResult ez = e_zero(s.norm, s.tw, s.e, defect);
      double k0 = k_zero(s.norm, s.tw);
      if (ez.value <= 1e-6 * k0) continue;
      Vector va = basis(s.norm.system.dim(0));
      Vector vb = basis(s.norm.system.dim(2));
      double eps = 1e-3;
      double measured = eps * eps * phi_norm(s.t, s.norm, eps, 0, va, 2, vb);
      double predicted = quadratic_growth_constant(ez.value, k0, s.norm, 0, va, 2, vb);
      double rel = std::abs(measured - predicted) / predicted;
      line(4, rel <= 0.02,
           fmt("quadratic-regime constant (seed %.0f): eps^2 phi = %.6g vs predicted %.6g",
               static_cast<double>(seed), measured, predicted) +
               fmt(" (rel dev %.2e)", rel));
      done = true;
    }
    if (!done) line(4, false, "no qualifying inequivalent system found");
  }

  // 5. Multiplicity dichotomy and agreement of the two equivalence signals
  //    across at least 20 random normalized irreducible systems.
  {
    int tested = 0;
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 24 && tested < 20; ++seed) {
      MatrixSystem sys = random_system(alphabet, testutil::dims_for_seed(seed), seed);
      if (!is_irreducible(sys, 8, seed).irreducible()) continue;
      Built s(sys, "dichotomy");
      ++tested;
      bool equivalent = equivalence_maps(s.norm.system, s.tw.system).has_value();
      bool spectrum_signal = false;
      for (const Complex& mu : eigenvalues_of(s.t.dee_block(1, 1)))
        if (std::abs(mu - 1.0) <= tol::cluster) spectrum_signal = true;
      int mult = eig_one_multiplicity(s.t.dee()).multiplicity;
      bool consistent =
          (equivalent == spectrum_signal) && (mult == (equivalent ? 4 : 2));
      if (!consistent) {
        ok = false;
        detail = " first failure at seed " + std::to_string(seed) + " (mult " +
                 std::to_string(mult) + ")";
      }
    }
    // the equivalent branch, which random draws never hit, via the endpoint
    {
      const Built& s = systems[0];
      bool equivalent = equivalence_maps(s.norm.system, s.tw.system).has_value();
      int mult = eig_one_multiplicity(s.t.dee()).multiplicity;
      if (!(equivalent && mult == 4)) ok = false;
    }
    line(5, ok && tested >= 20,
         "multiplicity dichotomy and dual equivalence signals on " + std::to_string(tested + 1) +
             " systems" + detail);
  }

  // 6. Defect-map fixed-point residual on every inequivalent test system.
  // 7. Nonnegativity and two-form agreement of the cocycle defect.
  {
    double worst_q = 0.0;
    double worst_gap = 0.0;
    double min_e0 = std::numeric_limits<double>::infinity();
    bool all_ok = true;
    int count = 0;
    std::vector<Built> pool;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      MatrixSystem sys = random_system(alphabet, testutil::dims_for_seed(seed), seed);
      if (!is_irreducible(sys, 8, seed).irreducible()) continue;
      pool.emplace_back(sys, "defect pool");
    }
    pool.emplace_back(iso2_phase(M_PI / 3.0), "phase-twisted");
    for (const Built& s : pool) {
      if (equivalence_maps(s.norm.system, s.tw.system)) continue;
      try {
        DefectMaps defect = q_maps(s.norm, s.tw, s.e, s.t);
        worst_q = std::max(worst_q, defect.residual_eqlemq);
        EZeroResult ez = e_zero(s.norm, s.tw, s.e, defect);
        min_e0 = std::min(min_e0, ez.value);
        worst_gap = std::max(worst_gap, std::abs(ez.value - ez.three_term) /
                                            (1.0 + std::abs(ez.value)));
        ++count;
      } catch (const std::exception& ex) {
        all_ok = false;
      }
    }
    line(6, all_ok && worst_q <= 1e-8 && count >= 6,
         fmt("defect-map residual on %.0f inequivalent systems: worst %.2e",
             static_cast<double>(count), worst_q));
    line(7, all_ok && min_e0 >= -1e-10 && worst_gap <= 1e-9,
         fmt("cocycle defect: min %.2e, two-form rel gap %.2e", min_e0, worst_gap));
  }

  // 8. Boundary limit on the isotropic endpoint: 1/12 within 1%.
  {
    const Built& s = systems[0];
    Vector one = basis(1);
    double predicted = boundary_limit_prediction(s.norm, s.tw, 2, 0, one, 2, one);
    double measured = boundary_limit_measured(s.t, s.norm, 2, 0, one, 2, one);
    double rel = std::abs(measured - predicted) / predicted;
    bool pass = std::abs(predicted - 1.0 / 12.0) <= 1e-12 && rel <= 0.01;
    line(8, pass, fmt("boundary limit: predicted %.9f, extrapolated %.9f", predicted, measured));
  }

  // 9. Square-sum sphere bound to radius 10 and unit spectral radius.
  {
    bool ok = true;
    double worst_radius_dev = 0.0;
    for (const Built& s : systems) {
      Vector va = basis(s.norm.system.dim(0));
      double norm4 = std::pow(form_value(s.norm.forms.at(0), va, va).real(), 2);
      for (int n = 1; n <= 10; ++n) {
        double total = 0.0;
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d)
            total += sphere_sum(s.t, s.norm, n, c, d, 0, va, 0, va).value;
        if (total > (n + 1.0) * (n + 1.0) * norm4 * (1.0 + 1e-9)) ok = false;
      }
      double radius = 0.0;
      for (const Complex& mu : eigenvalues_of(s.t.dee())) radius = std::max(radius, std::abs(mu));
      worst_radius_dev = std::max(worst_radius_dev, std::abs(radius - 1.0));
    }
    line(9, ok && worst_radius_dev <= 1e-6,
         fmt("sphere bound to n = 10 on all systems; spectral radius dev %.2e",
             worst_radius_dev));
  }

  // 10. Coupling adjoint identity and compatibility residual.
  {
    double worst_adjoint = 0.0;
    double worst_resid = 0.0;
    for (const Built& s : systems) {
      worst_adjoint = std::max(worst_adjoint, s.e.adjoint_deviation(alphabet));
      worst_resid = std::max(worst_resid, s.norm.residual);
      worst_resid = std::max(worst_resid, s.tw.compat_residual);
    }
    line(10, worst_adjoint <= 1e-12 && worst_resid <= 1e-10,
         fmt("adjoint identity %.2e, compatibility residual %.2e", worst_adjoint, worst_resid));
  }

  if (failures == 0) std::printf("all criteria passed\n");
  return failures == 0 ? 0 : 1;
}
