// Copyright 2026 The topoinpaint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// topoinpaint: compress/decompress images by PDE inpainting from a sparse
// pixel mask, run the method-comparison experiments and the oracle checks.
//
// Exit codes: 0 ok, 2 bad flags, 3 I/O, 4 solver failure, 5 decode error,
// 6 validation failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "topoinpaint/topoinpaint.hpp"

namespace tp = topoinpaint;

namespace {

enum Exit { kOk = 0, kBadFlags = 2, kIo = 3, kSolver = 4, kDecode = 5, kValidation = 6 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CostFlags {
  int p = 1;
  double eps_reg = 1e-4;

  tp::CostMode mode() const {
    if (p != 1 && p != 2) throw UsageError("--p must be 1 or 2");
    if (p == 2) return tp::CostMode::l2();
    if (!(eps_reg > 0.0)) throw UsageError("--eps-reg must be > 0");
    return tp::CostMode::l1(eps_reg);
  }

  void add_to(CLI::App* app) {
    app->add_option("--p", p, "cost exponent: 1 (regularized L1) or 2 (L2)")
        ->capture_default_str();
    app->add_option("--eps-reg", eps_reg, "regularization of the L1 cost sqrt(s^2+eps)")
        ->capture_default_str();
  }
};

struct SolverFlags {
  double tol = 1e-8;
  int max_iter = 0;

  tp::SolveParams params() const {
    tp::SolveParams p{1.0, tol, max_iter};
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return p;
  }

  void add_to(CLI::App* app) {
    app->add_option("--tol", tol, "relative residual target of the CG solver")
        ->capture_default_str();
    app->add_option("--max-iter", max_iter, "CG iteration cap (0: 10*max(width,height))")
        ->capture_default_str();
  }
};

tp::MethodTag method_of(const std::string& s) {
  const auto m = tp::parse_method(s);
  if (!m) throw UsageError("unknown method '" + s + "' (adj-t, adj-h, h1-t, h1-h)");
  return *m;
}

tp::ReconRhsMode rhs_mode_of(const std::string& s) {
  const auto m = tp::parse_rhs_mode(s);
  if (!m) throw UsageError("unknown rhs mode '" + s + "' (zero, nn-extend, harmonic)");
  return *m;
}

tp::Budget budget_of(double f) {
  if (!(f > 0.0 && f <= 1.0)) {
    throw UsageError("budget must lie in (0,1], got " + std::to_string(f));
  }
  return tp::Budget(f);
}

double positive(double v, const char* flag) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw UsageError(std::string(flag) + " must be finite and > 0");
  }
  return v;
}

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("INPAINT_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 4096) return static_cast<unsigned>(v);
    throw UsageError("INPAINT_THREADS must be a positive integer");
  }
  return tp::hardware_threads();
}

tp::Image read_pgm(const std::string& path) {
  const auto bytes = tp::read_file(path);
  try {
    return tp::load_pgm(bytes);
  } catch (const tp::ParseError& e) {
    throw tp::IoError(path + ": " + e.what());
  }
}

struct Stats {
  double min = 0.0, max = 0.0, mean = 0.0;
};

Stats stats_of(const tp::Field& f) {
  Stats s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
  for (double v : f.values()) {
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    s.mean += v;
  }
  s.mean /= static_cast<double>(f.size());
  return s;
}

// compress ------------------------------------------------------------------

struct CompressArgs {
  std::string input, output;
  std::string method = "adj-h";
  std::string rhs_mode = "zero";
  double budget = 0.1;
  double alpha = 1.0;
  CostFlags cost;
  SolverFlags solver;
};

int run_compress(const CompressArgs& a) {
  const auto method = method_of(a.method);
  const auto rhs = rhs_mode_of(a.rhs_mode);
  const auto budget = budget_of(a.budget);
  const auto mode = a.cost.mode();
  const auto params = a.solver.params();
  const double alpha = positive(a.alpha, "--alpha");
  const tp::Image f = read_pgm(a.input);
  tp::CriterionField crit;
  const auto c = tp::compress(f, method, mode, budget, alpha, params, rhs, &crit);
  const auto bytes = tp::encode_bytes(c);
  tp::write_file(a.output, bytes);
  const auto st = stats_of(crit.values);
  std::printf("method %s  alpha %g  rhs-mode %s\n", std::string(tp::to_string(method)).c_str(),
              alpha, std::string(tp::to_string(rhs)).c_str());
  std::printf("mask %zu of %zu pixels  density %.6f\n", c.mask.count(), c.mask.size(),
              tp::mask_density(c.mask));
  std::printf("criterion min %.6g  max %.6g  mean %.6g\n", st.min, st.max, st.mean);
  std::printf("wrote %zu bytes to %s\n", bytes.size(), a.output.c_str());
  return kOk;
}

// decompress ----------------------------------------------------------------

struct DecompressArgs {
  std::string input, output;
  std::string rhs_mode;  // empty: use the embedded mode
  SolverFlags solver;
};

int run_decompress(const DecompressArgs& a) {
  const auto params = a.solver.params();
  std::optional<tp::ReconRhsMode> override_mode;
  if (!a.rhs_mode.empty()) override_mode = rhs_mode_of(a.rhs_mode);
  auto c = tp::decode_bytes(tp::read_file(a.input));
  if (override_mode) c.rhs_mode = *override_mode;
  const tp::Image u = tp::decompress(c, params);
  tp::write_file(a.output, tp::save_pgm(u));
  std::printf("%ux%u  stored %zu  rhs-mode %s  alpha %g\n", c.width, c.height, c.mask.count(),
              std::string(tp::to_string(c.rhs_mode)).c_str(), c.alpha_recon);
  return kOk;
}

// experiment ----------------------------------------------------------------

template <typename T, typename Parse>
std::vector<T> split_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("empty item in list '" + text + "'");
    out.push_back(parse(item));
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

double number_of(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + tp::detail::sig6(v[i]);
  return out;
}

struct ExperimentArgs {
  std::string input;
  std::vector<std::string> noise;
  std::string methods = "adj-t,adj-h,h1-t,h1-h";
  std::string budgets = "0.1";
  std::string alpha_grid;
  std::string rhs_mode = "zero";
  std::uint64_t seed = 1;
  std::string out;
  CostFlags cost;
  SolverFlags solver;
};

int run_experiment(const ExperimentArgs& a, unsigned threads) {
  tp::ExperimentConfig cfg;
  cfg.mode = a.cost.mode();
  cfg.rhs_mode = rhs_mode_of(a.rhs_mode);
  cfg.params = a.solver.params();
  cfg.threads = threads;
  const auto methods = split_list<tp::MethodTag>(a.methods, method_of);
  const auto budgets = split_list<double>(a.budgets, [](const std::string& s) {
    return budget_of(number_of(s)).fraction();
  });
  const auto grid = a.alpha_grid.empty()
                        ? tp::default_alpha_grid()
                        : split_list<double>(a.alpha_grid, [](const std::string& s) {
                            return positive(number_of(s), "--alpha-grid");
                          });
  std::vector<tp::NoiseSpec> noises;
  const std::vector<std::string> specs =
      a.noise.empty() ? std::vector<std::string>{"sp:0.02,0"} : a.noise;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto n = tp::parse_noise(specs[i], a.seed + i);
    if (!n) throw UsageError("bad --noise '" + specs[i] + "' (sp:<salt>,<pepper> | gauss:<sigma> | none)");
    noises.push_back(*n);
  }
  const tp::Image f = read_pgm(a.input);
  const auto rows = tp::run_table(f, noises, methods, budgets, grid, cfg);
  const std::vector<std::string> meta = {
      "seed=" + std::to_string(a.seed),
      "p=" + std::to_string(cfg.mode.p()),
      "eps_reg=" + tp::detail::sig6(cfg.mode.epsilon_reg),
      "rhs_mode=" + std::string(tp::to_string(cfg.rhs_mode)),
      "alpha_grid=" + join_numbers(grid),
  };
  const auto csv = tp::to_csv(rows, meta);
  if (a.out.empty()) {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  } else {
    tp::write_file(a.out, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
  }
  return kOk;
}

// validate ------------------------------------------------------------------

struct ValidateArgs {
  std::size_t grid = 32;
  bool skip_bessel = false;
  std::size_t samples = 50;
  std::uint64_t seed = 1;
};

int run_validate(const ValidateArgs& a, unsigned threads) {
  if (a.grid < 8) throw UsageError("--grid must be >= 8");
  if (a.samples < 10) throw UsageError("--samples must be >= 10");
  std::vector<std::string> failed;
  const auto check = [&](bool ok, const std::string& name, const std::string& detail) {
    std::printf("%-6s %-34s %s\n", ok ? "ok" : "FAIL", name.c_str(), detail.c_str());
    if (!ok) failed.push_back(name);
  };
  char buf[256];

  if (!a.skip_bessel) {
    const auto sw = tp::bessel_sweep(200, 1e-3, 50.0);
    std::snprintf(buf, sizeof buf, "max rel err K0 %.2e  K1 %.2e  switch jump %.2e",
                  sw.max_rel_error_k0, sw.max_rel_error_k1, sw.switch_jump);
    check(sw.max_rel_error_k0 <= 1e-10 && sw.max_rel_error_k1 <= 1e-10 && sw.switch_jump <= 1e-10,
          "bessel accuracy", buf);
    check(sw.positive_decreasing && sw.k1_exceeds_k0, "bessel monotonicity", "z in [1e-3, 50]");
    const double z = 30.0;
    const double ratio = tp::bessel_k(z).k0 * std::sqrt(2.0 * z / std::numbers::pi) * std::exp(z);
    std::snprintf(buf, sizeof buf, "K0(30) sqrt(60/pi) e^30 = %.6f", ratio);
    check(ratio >= 0.99 && ratio <= 1.01, "bessel asymptotic ratio", buf);
    std::snprintf(buf, sizeof buf, "c = 1/E(1) at alpha 1: %.6f", tp::expansion_constant(1.0));
    check(tp::expansion_constant(1.0) > 0.0, "expansion constant", buf);

    std::vector<tp::FundamentalResidual> res;
    for (std::size_t n : {256, 512, 1024}) res.push_back(tp::fundamental_solution_residual(0.05, n));
    const double o1 = std::log2(res[0].max_residual / res[1].max_residual);
    const double o2 = std::log2(res[1].max_residual / res[2].max_residual);
    std::snprintf(buf, sizeof buf, "residual %.2e %.2e %.2e  order %.2f %.2f", res[0].max_residual,
                  res[1].max_residual, res[2].max_residual, o1, o2);
    check(o1 >= 1.8 && o2 >= 1.8, "fundamental solution order", buf);
  }

  const std::pair<const char*, tp::Image> images[] = {
      {"smooth-bump", tp::synthetic::smooth_bump(a.grid)},
      {"step-edge", tp::synthetic::step_edge(a.grid)},
      {"bump-outlier", tp::synthetic::bump_with_outlier(a.grid)},
  };
  tp::RankingStudyConfig cfg;
  cfg.samples = a.samples;
  cfg.seed = a.seed;
  cfg.threads = threads;
  const tp::SolveParams params{cfg.alpha, 1e-10, 0};
  for (const auto& [name, img] : images) {
    const auto st = tp::ranking_study(img, params, cfg);
    const auto& r = st.report;
    std::snprintf(buf, sizeof buf, "spearman %.3f  top-%zu overlap %.2f  best dJ %.3e",
                  r.spearman, r.k, r.top_k_overlap, st.best_delta_j);
    check(!r.degenerate && r.spearman >= 0.7 && r.top_k_overlap >= 0.5 && st.best_delta_j < 0.0,
          std::string("ranking ") + name, buf);
  }

  if (!failed.empty()) {
    std::fprintf(stderr, "validation failed:");
    for (const auto& f : failed) std::fprintf(stderr, " [%s]", f.c_str());
    std::fprintf(stderr, "\n");
    return kValidation;
  }
  std::printf("all checks passed\n");
  return kOk;
}

// noise ---------------------------------------------------------------------

struct NoiseArgs {
  std::string input, output;
  std::string noise = "sp:0.02,0";
  std::uint64_t seed = 1;
};

int run_noise(const NoiseArgs& a) {
  const auto spec = tp::parse_noise(a.noise, a.seed);
  if (!spec) throw UsageError("bad --noise '" + a.noise + "'");
  const tp::Image f = read_pgm(a.input);
  tp::write_file(a.output, tp::save_pgm(tp::apply_noise(f, *spec)));
  return kOk;
}

// criterion -----------------------------------------------------------------

struct CriterionArgs {
  std::string input, output;
  std::string method = "adj-h";
  double alpha = 1.0;
  CostFlags cost;
  SolverFlags solver;
};

int run_criterion(const CriterionArgs& a) {
  const auto method = method_of(a.method);
  const auto mode = a.cost.mode();
  const auto params = a.solver.params();
  const double alpha = positive(a.alpha, "--alpha");
  const tp::Image f = read_pgm(a.input);
  const auto crit = tp::method_criterion(f, method, mode, alpha, params);
  const auto st = stats_of(crit.values);
  tp::Field heat(f.width(), f.height());
  const double span = st.max - st.min;
  for (std::size_t i = 0; i < heat.size(); ++i) {
    heat[i] = span > 0.0 ? (crit.values[i] - st.min) / span : 0.0;
  }
  tp::write_file(a.output, tp::save_pgm(tp::Image::clamped(std::move(heat))));
  std::printf("criterion min %.6g  max %.6g  mean %.6g\n", st.min, st.max, st.mean);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Image compression by PDE inpainting with topological-gradient masks"};
  app.set_version_flag("--version", std::string("PIC1/") + std::to_string(tp::kPicVersion));
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads_flag = 0;
  app.add_option("--threads", threads_flag,
                 "worker threads (0: $INPAINT_THREADS, else all cores)")
      ->capture_default_str();

  CompressArgs ca;
  auto* compress = app.add_subcommand("compress", "select a mask and write a PIC1 file");
  compress->add_option("input", ca.input, "input PGM")->required();
  compress->add_option("output", ca.output, "output PIC1 file")->required();
  compress->add_option("--method", ca.method, "adj-t, adj-h, h1-t or h1-h")->capture_default_str();
  compress->add_option("--budget", ca.budget, "fraction of pixels stored")->capture_default_str();
  compress->add_option("--alpha", ca.alpha, "diffusion weight for selection and decoding")
      ->capture_default_str();
  compress->add_option("--rhs-mode", ca.rhs_mode, "decoder right-hand side: zero, nn-extend, harmonic")
      ->capture_default_str();
  ca.cost.add_to(compress);
  ca.solver.add_to(compress);

  DecompressArgs da;
  auto* decompress = app.add_subcommand("decompress", "reconstruct a PGM from a PIC1 file");
  decompress->add_option("input", da.input, "input PIC1 file")->required();
  decompress->add_option("output", da.output, "output PGM")->required();
  decompress->add_option("--rhs-mode", da.rhs_mode, "override the embedded rhs mode");
  da.solver.add_to(decompress);

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "best-alpha error table as CSV");
  experiment->add_option("input", ea.input, "clean input PGM")->required();
  experiment->add_option("--noise", ea.noise,
                         "noise spec, repeatable: sp:<salt>,<pepper> | gauss:<sigma> | none "
                         "(default sp:0.02,0)");
  experiment->add_option("--methods", ea.methods, "comma-separated methods")->capture_default_str();
  experiment->add_option("--budgets", ea.budgets, "comma-separated budget fractions")
      ->capture_default_str();
  experiment->add_option("--alpha-grid", ea.alpha_grid,
                         "comma-separated alphas (default 40 log-spaced in [0.01, 5.5])");
  experiment->add_option("--rhs-mode", ea.rhs_mode, "decoder right-hand side")->capture_default_str();
  experiment->add_option("--seed", ea.seed, "seed of the first noise spec (+i for the i-th)")
      ->capture_default_str();
  experiment->add_option("--out", ea.out, "CSV path (default stdout)");
  ea.cost.add_to(experiment);
  ea.solver.add_to(experiment);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Bessel, fundamental-solution and ranking oracles");
  validate->add_option("--grid", va.grid, "side of the synthetic test images")->capture_default_str();
  validate->add_flag("--skip-bessel", va.skip_bessel, "run only the ranking oracle");
  validate->add_option("--samples", va.samples, "oracle pixels per image")->capture_default_str();
  validate->add_option("--seed", va.seed, "seed of the base mask and sample")->capture_default_str();

  NoiseArgs na;
  auto* noise = app.add_subcommand("noise", "apply noise to a PGM");
  noise->add_option("input", na.input, "input PGM")->required();
  noise->add_option("output", na.output, "output PGM")->required();
  noise->add_option("--noise", na.noise, "sp:<salt>,<pepper> | gauss:<sigma>")->capture_default_str();
  noise->add_option("--seed", na.seed, "noise seed")->capture_default_str();

  CriterionArgs ra;
  auto* criterion = app.add_subcommand("criterion", "write the selection criterion as a PGM heat map");
  criterion->add_option("input", ra.input, "input PGM")->required();
  criterion->add_option("output", ra.output, "output PGM")->required();
  criterion->add_option("--method", ra.method, "adj-* for the keep-score, h1-* for |lap f|")
      ->capture_default_str();
  criterion->add_option("--alpha", ra.alpha, "diffusion weight")->capture_default_str();
  ra.cost.add_to(criterion);
  ra.solver.add_to(criterion);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    if (*compress) return run_compress(ca);
    if (*decompress) return run_decompress(da);
    if (*experiment) return run_experiment(ea, resolve_threads(threads_flag));
    if (*validate) return run_validate(va, resolve_threads(threads_flag));
    if (*noise) return run_noise(na);
    if (*criterion) return run_criterion(ra);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadFlags;
  } catch (const tp::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const tp::DecodeError& e) {
    std::fprintf(stderr, "decode error: %s\n", e.what());
    return kDecode;
  } catch (const tp::SolveError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kSolver;
  } catch (const tp::ReconstructionError& e) {
    std::fprintf(stderr, "reconstruction failure: %s\n", e.what());
    return kSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadFlags;
  }
  return kBadFlags;
}
