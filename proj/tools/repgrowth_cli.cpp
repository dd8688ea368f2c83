#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "repgrowth/repgrowth.hpp"

using namespace repgrowth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitSpectralAmbiguity = 4;
constexpr int kExitReducible = 5;

struct GlobalOptions {
  std::string input;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  std::string json_out;
};

struct ReducibleInputError : std::runtime_error {
  ReducibleInputError() : std::runtime_error("reducible input") {}
};

ReducedWord parse_word(const GeneratorAlphabet& alphabet, const std::string& text) {
  std::vector<int> letters;
  if (text != "e" && !text.empty()) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      if (text[pos] == '.') {
        ++pos;
        continue;
      }
      int best = -1;
      std::size_t best_len = 0;
      for (int l = 0; l < alphabet.size(); ++l) {
        const std::string& name = alphabet.name(l);
        if (name.size() > best_len && text.compare(pos, name.size(), name) == 0) {
          best = l;
          best_len = name.size();
        }
      }
      if (best < 0) throw ValidationError("cannot read word \"" + text + "\" at offset " +
                                          std::to_string(pos));
      letters.push_back(best);
      pos += best_len;
    }
  }
  auto word = ReducedWord::make(alphabet, std::move(letters));
  if (!word) throw ValidationError("word \"" + text + "\" is not reduced");
  return *word;
}

// Vector spec "a:1,0;b:0.5,0.5": per letter, 2*dim reals (re,im per
// coordinate). Letters not mentioned default to the first basis vector.
std::map<int, Vector> parse_vector_spec(const MatrixSystem& sys, const std::string& spec) {
  std::map<int, Vector> out;
  std::stringstream groups(spec);
  std::string group;
  while (std::getline(groups, group, ';')) {
    if (group.empty()) continue;
    auto colon = group.find(':');
    if (colon == std::string::npos)
      throw ValidationError("vector spec group \"" + group + "\" needs letter:coords");
    auto letter = sys.alphabet().find(group.substr(0, colon));
    if (!letter) throw ValidationError("unknown letter in vector spec: \"" + group + "\"");
    std::vector<double> reals;
    std::stringstream coords(group.substr(colon + 1));
    std::string item;
    while (std::getline(coords, item, ',')) {
      try {
        reals.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ValidationError("bad coordinate \"" + item + "\" in vector spec");
      }
    }
    if (static_cast<int>(reals.size()) != 2 * sys.dim(*letter))
      throw ValidationError("vector spec for letter \"" + sys.alphabet().name(*letter) +
                            "\" needs " + std::to_string(2 * sys.dim(*letter)) + " reals");
    Vector v(sys.dim(*letter));
    for (int i = 0; i < sys.dim(*letter); ++i)
      v(i) = Complex(reals[static_cast<std::size_t>(2 * i)],
                     reals[static_cast<std::size_t>(2 * i + 1)]);
    out[*letter] = v;
  }
  return out;
}

Vector vector_for(const std::map<int, Vector>& given, const MatrixSystem& sys, int letter) {
  auto it = given.find(letter);
  if (it != given.end()) return it->second;
  Vector v = Vector::Zero(sys.dim(letter));
  v(0) = 1.0;
  return v;
}

// Load, validate, reject reducible input (exit 5) and normalize.
NormalizedSystem load_normalized(const GlobalOptions& opt) {
  MatrixSystem sys = load_system(opt.input);
  auto verdict = is_irreducible(sys, 8, opt.seed);
  if (!verdict.irreducible()) {
    std::cout << "input system is reducible; invariant subspace witness:\n";
    for (int a = 0; a < sys.letters(); ++a) {
      const Matrix& w = verdict.witness->bases[static_cast<std::size_t>(a)];
      std::cout << "  " << sys.alphabet().name(a) << ": dimension " << w.cols() << " of "
                << sys.dim(a) << "\n";
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        std::cout << "    basis vector:";
        for (Eigen::Index i = 0; i < w.rows(); ++i)
          std::cout << " (" << w(i, j).real() << ", " << w(i, j).imag() << ")";
        std::cout << "\n";
      }
    }
    throw ReducibleInputError();
  }
  return normalize(sys);
}

std::string format_profile(const std::vector<int>& sizes) {
  std::string out = "{";
  for (std::size_t i = 0; i < sizes.size(); ++i)
    out += (i ? "," : "") + std::to_string(sizes[i]);
  return out + "}";
}

int cmd_check(const GlobalOptions& opt) {
  MatrixSystem sys = load_system(opt.input);
  int blocks = 0;
  for (int b = 0; b < sys.letters(); ++b)
    for (int a = 0; a < sys.letters(); ++a)
      if (sys.allowed(b, a)) ++blocks;
  std::cout << "valid: " << sys.letters() << " letters, total dimension " << sys.total_dim()
            << ", " << blocks << " blocks\n";
  return kExitOk;
}

int cmd_normalize(const GlobalOptions& opt) {
  NormalizedSystem norm = load_normalized(opt);
  std::cout << "scale = " << norm.scale << "\n";
  std::cout << "compatibility residual = " << norm.residual << "\n";
  for (const auto& mu : norm.peripheral_warnings)
    std::cout << "warning: peripheral eigenvalue (" << mu.real() << ", " << mu.imag() << ")\n";
  if (!opt.json_out.empty()) save_text(opt.json_out, serialize_system(norm.system));
  return kExitOk;
}

int cmd_twin(const GlobalOptions& opt) {
  NormalizedSystem norm = load_normalized(opt);
  TwinSystem tw = twin(norm);
  std::cout << "twin Perron value = " << tw.perron << "\n";
  std::cout << "twin compatibility residual = " << tw.compat_residual << "\n";
  if (!opt.json_out.empty()) save_text(opt.json_out, serialize_system(tw.system));
  return kExitOk;
}

int cmd_classify(const GlobalOptions& opt) {
  NormalizedSystem norm = load_normalized(opt);
  SpectralReport report = classify_growth(norm);
  std::cout << "alpha = " << report.alpha << "\n";
  if (report.verdict == Verdict::UniqueRealizationAndIrreducible)
    std::cout << "verdict: unique boundary realization; irreducible as a group representation\n";
  else
    std::cout << "verdict: inconclusive (growth hypothesis not met)\n";
  std::cout << "equivalent to twin: " << (report.equivalent_to_twin ? "yes" : "no") << "\n";
  std::cout << "multiplicity of eigenvalue 1: " << report.multiplicity_one << "\n";
  std::cout << "jordan profile: " << format_profile(report.jordan.block_sizes) << "\n";
  std::cout << "k0 = " << report.k0 << "\n";
  if (report.e0) std::cout << "E0 = " << *report.e0 << "\n";
  if (report.lambda) std::cout << "lambda = " << *report.lambda << "\n";
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  if (!opt.json_out.empty()) {
    nlohmann::json doc = report_to_json(report, norm);
    save_text(opt.json_out, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_coeff(const GlobalOptions& opt, const std::string& word_text, const std::string& a_name,
              const std::string& b_name, const std::string& vspec) {
  NormalizedSystem norm = load_normalized(opt);
  const auto& alphabet = norm.system.alphabet();
  ReducedWord word = parse_word(alphabet, word_text);
  if (word.empty()) throw ValidationError("coeff needs a nonempty word");
  int a = a_name.empty() ? 0 : alphabet.find(a_name).value_or(-1);
  int b = b_name.empty() ? 0 : alphabet.find(b_name).value_or(-1);
  if (a < 0 || b < 0) throw ValidationError("unknown letter in --a/--b");
  auto vectors = parse_vector_spec(norm.system, vspec);
  Vector v_a = vector_for(vectors, norm.system, a);
  Vector v_b = vector_for(vectors, norm.system, b);

  TwinSystem tw = twin(norm);
  CouplingMaps e = coupling(norm, tw);
  auto records = oracle::coefficient_records(norm, e, word, a, v_a, b, v_b);
  std::cout << "word " << word.str(alphabet) << ", a = " << alphabet.name(a)
            << ", b = " << alphabet.name(b) << "\n";
  for (const auto& rec : records)
    std::printf("%-16s = (%.12g, %.12g)\n", oracle::method_name(rec.method), rec.value.real(),
                rec.value.imag());
  double dev = oracle::pairwise_deviation(records);
  std::cout << "max relative deviation = " << dev << "\n";
  return dev <= opt.tolerance ? kExitOk : kExitFailure;
}

int cmd_verify(const GlobalOptions& opt, int max_length, int trials, bool corrupt) {
  if (max_length < 1) throw ValidationError("J must be >= 1");
  NormalizedSystem norm = load_normalized(opt);
  const auto& alphabet = norm.system.alphabet();
  const int n = alphabet.size();
  SeededRng rng(opt.seed);

  TwinSystem tw = twin(norm);
  CouplingMaps e = coupling(norm, tw);
  CouplingMaps e_transfer = e;
  if (corrupt) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (b != alphabet.inverse(a))
          e_transfer.blocks[static_cast<std::size_t>(a) * n + b](0, 0) += 0.05;
    std::cout << "self-test: corruption injected into the transfer path\n";
  }
  TransferOperator t = build_transfer(norm, tw, e_transfer);

  bool ok = true;
  auto report = [&](const std::string& name, double dev, double bound) {
    bool pass = dev <= bound;
    std::cout << (pass ? "pass" : "FAIL") << "  " << name << ": max deviation " << dev
              << " (bound " << bound << ")\n";
    if (!pass) ok = false;
  };

  report("adjoint identity", e.adjoint_deviation(alphabet), 1e-12);

  int a = rng.uniform_int(n);
  int b = rng.uniform_int(n);
  Vector v_a = rng.complex_gaussian_vector(norm.system.dim(a)).normalized();
  Vector v_b = rng.complex_gaussian_vector(norm.system.dim(b)).normalized();

  double dev3 = 0.0;
  for (int i = 0; i < trials; ++i) {
    int len = 1 + rng.uniform_int(std::min(5, max_length));
    std::vector<int> letters;
    for (int j = 0; j < len; ++j) {
      int l = rng.uniform_int(n);
      while (!letters.empty() && l == alphabet.inverse(letters.back())) l = rng.uniform_int(n);
      letters.push_back(l);
    }
    ReducedWord word{std::move(letters)};
    Complex direct = oracle::coefficient_direct(norm, e, word, a, v_a, b, v_b);
    Complex recursive = oracle::coefficient_recursive(norm, e, word, a, v_a, b, v_b);
    Complex first = oracle::coefficient_first_principles(norm, word, a, v_a, b, v_b,
                                                         word.length() + 1);
    double scale = 1.0 + std::abs(direct);
    dev3 = std::max(dev3, std::abs(direct - recursive) / scale);
    dev3 = std::max(dev3, std::abs(direct - first) / scale);
  }
  report("three-way coefficient agreement (" + std::to_string(trials) + " words)", dev3,
         opt.tolerance);

  double dev_sphere = 0.0;
  for (int big_j = 1; big_j <= max_length; ++big_j)
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d) {
        double lhs = sphere_sum(t, norm, big_j, c, d, a, v_a, b, v_b).value;
        double rhs = oracle::sphere_sum_brute(norm, e, big_j, c, d, a, v_a, b, v_b);
        dev_sphere = std::max(dev_sphere, std::abs(lhs - rhs) / (1.0 + rhs));
      }
  report("sphere-sum identity (J <= " + std::to_string(max_length) + ")", dev_sphere,
         opt.tolerance);

  double norm_v4 = std::pow(form_value(norm.forms.at(a), v_a, v_a).real(), 2);
  double sphere_bound_excess = 0.0;
  for (int sphere = 1; sphere <= 10; ++sphere) {
    double total = 0.0;
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d)
        total += sphere_sum(t, norm, sphere, c, d, a, v_a, a, v_a).value;
    double bound = (sphere + 1.0) * (sphere + 1.0) * norm_v4;
    sphere_bound_excess = std::max(sphere_bound_excess, (total - bound) / bound);
  }
  report("square-sum sphere bound (n <= 10)", sphere_bound_excess, 0.0 + opt.tolerance);

  std::cout << (ok ? "all checks passed\n" : "verification failed\n");
  return ok ? kExitOk : kExitFailure;
}

int cmd_sweep(const GlobalOptions& opt, const std::string& a_name, const std::string& b_name,
              const std::string& vspec, double eps_min, double eps_max, int steps) {
  NormalizedSystem norm = load_normalized(opt);
  const auto& alphabet = norm.system.alphabet();
  int a = a_name.empty() ? 0 : alphabet.find(a_name).value_or(-1);
  int b = b_name.empty() ? 0 : alphabet.find(b_name).value_or(-1);
  if (a < 0 || b < 0) throw ValidationError("unknown letter in --a/--b");
  auto vectors = parse_vector_spec(norm.system, vspec);
  Vector v_a = vector_for(vectors, norm.system, a);
  Vector v_b = vector_for(vectors, norm.system, b);

  SpectralReport report = classify_growth(norm);
  TwinSystem tw = twin(norm);
  CouplingMaps e = coupling(norm, tw);
  TransferOperator t = build_transfer(norm, tw, e);
  SweepResult sweep = run_sweep(t, norm, eps_min, eps_max, steps, a, v_a, b, v_b);

  for (std::size_t i = 0; i < sweep.eps_grid.size(); ++i)
    std::cout << "eps " << sweep.eps_grid[i] << "  value " << sweep.values[i] << "\n";
  std::printf("fitted alpha = %.4f  (fit residual %.2e)\n", sweep.fitted_alpha,
              sweep.fit_residual);
  std::printf("spectral alpha = %d\n", report.alpha);
  if (report.alpha == 2 && report.e0) {
    double eps = sweep.eps_grid.back();
    double measured = eps * eps * sweep.values.back();
    double predicted = quadratic_growth_constant(*report.e0, report.k0, norm, a, v_a, b, v_b);
    std::printf("eps^2 * value at eps = %g: %.6g  (predicted constant %.6g)\n", eps, measured,
                predicted);
  }
  return std::abs(sweep.fitted_alpha - report.alpha) <= 0.1 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growth analysis of matrix coefficients for multiplicative free-group "
               "representations"};
  app.require_subcommand(1);

  GlobalOptions opt;
  app.add_option("--input", opt.input, "system file (JSON)");
  app.add_option("--tol", opt.tolerance, "numerical tolerance for verification checks");
  app.add_option("--seed", opt.seed, "seed for all randomized steps");
  app.add_option("--json-out", opt.json_out, "write the machine-readable result here");

  auto* check = app.add_subcommand("check", "validate a system file");
  auto* normalize_cmd = app.add_subcommand("normalize", "rescale to the compatibility fixed point");
  auto* twin_cmd = app.add_subcommand("twin", "build the twin system");
  auto* classify = app.add_subcommand("classify", "growth exponent and uniqueness verdict");

  auto* coeff = app.add_subcommand("coeff", "evaluate one matrix coefficient three ways");
  std::string word_text, a_name, b_name, vspec;
  coeff->add_option("--word", word_text, "reduced word, e.g. abA")->required();
  coeff->add_option("--a", a_name, "letter of the left vector (default: first letter)");
  coeff->add_option("--b", b_name, "letter of the right vector (default: first letter)");
  coeff->add_option("--v", vspec, "vector spec, e.g. a:1,0;b:0.5,0.5");

  auto* verify = app.add_subcommand("verify", "cross-validate transfer machinery against brute force");
  int max_length = 5, trials = 200;
  bool corrupt = false;
  verify->add_option("--max-length", max_length, "largest sphere radius J");
  verify->add_option("--trials", trials, "random words for the coefficient agreement");
  verify->add_flag("--corrupt", corrupt, "negative control: corrupt the transfer path");

  auto* sweep = app.add_subcommand("sweep", "eps sweep with exponent fit");
  std::string sweep_a, sweep_b, sweep_v;
  double eps_min = 1e-3, eps_max = 1e-1;
  int eps_steps = 20;
  sweep->add_option("--a", sweep_a, "letter of the left vector");
  sweep->add_option("--b", sweep_b, "letter of the right vector");
  sweep->add_option("--v", sweep_v, "vector spec");
  sweep->add_option("--eps-min", eps_min, "smallest eps");
  sweep->add_option("--eps-max", eps_max, "largest eps");
  sweep->add_option("--eps-steps", eps_steps, "grid size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (opt.input.empty()) throw IoError("--input is required");
    if (check->parsed()) return cmd_check(opt);
    if (normalize_cmd->parsed()) return cmd_normalize(opt);
    if (twin_cmd->parsed()) return cmd_twin(opt);
    if (classify->parsed()) return cmd_classify(opt);
    if (coeff->parsed()) return cmd_coeff(opt, word_text, a_name, b_name, vspec);
    if (verify->parsed()) return cmd_verify(opt, max_length, trials, corrupt);
    if (sweep->parsed())
      return cmd_sweep(opt, sweep_a, sweep_b, sweep_v, eps_min, eps_max, eps_steps);
    return kExitFailure;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SpectralAmbiguityError& e) {
    std::cerr << "spectral ambiguity: " << e.what() << "\n";
    return kExitSpectralAmbiguity;
  } catch (const ReducibleInputError&) {
    return kExitReducible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
