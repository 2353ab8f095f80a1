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

#pragma once

// Noise models, Lp error metrics, alpha grid search and the method
// comparison table.
//
// Randomness: std::mt19937_64 seeded with NoiseSpec::seed. Uniforms take the
// top 53 bits of each draw; normals use the Box-Muller transform with both
// outputs consumed in order. Both are fully specified by the standard, so
// noise realizations are identical on every platform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "topoinpaint/codec.hpp"
#include "topoinpaint/criterion.hpp"
#include "topoinpaint/grid.hpp"
#include "topoinpaint/parallel.hpp"
#include "topoinpaint/select.hpp"
#include "topoinpaint/solver.hpp"

namespace topoinpaint {

struct SaltPepper {
  double p_salt = 0.0;
  double p_pepper = 0.0;
};

struct Gaussian {
  double sigma = 0.0;
};

struct NoiseSpec {
  std::variant<SaltPepper, Gaussian> kind;
  std::uint64_t seed = 0;

  void validate() const {
    if (const auto* sp = std::get_if<SaltPepper>(&kind)) {
      if (!(sp->p_salt >= 0.0 && sp->p_pepper >= 0.0 && sp->p_salt + sp->p_pepper <= 1.0)) {
        throw std::invalid_argument("NoiseSpec: need p_salt, p_pepper >= 0 and sum <= 1");
      }
    } else if (!(std::get<Gaussian>(kind).sigma >= 0.0)) {
      throw std::invalid_argument("NoiseSpec: sigma must be >= 0");
    }
  }

  /// "sp:<salt>,<pepper>" or "gauss:<sigma>".
  std::string describe() const {
    std::ostringstream os;
    os.precision(6);
    if (const auto* sp = std::get_if<SaltPepper>(&kind)) {
      os << "sp:" << sp->p_salt << "," << sp->p_pepper;
    } else {
      os << "gauss:" << std::get<Gaussian>(kind).sigma;
    }
    return os.str();
  }
};

/// Parses the describe() syntax; "none" is salt-and-pepper with zero rates.
inline std::optional<NoiseSpec> parse_noise(std::string_view text, std::uint64_t seed) {
  const auto number = [](std::string_view s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  };
  NoiseSpec spec;
  spec.seed = seed;
  if (text == "none") {
    spec.kind = SaltPepper{};
  } else if (text.starts_with("sp:")) {
    const auto rest = text.substr(3);
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    const auto salt = number(rest.substr(0, comma));
    const auto pepper = number(rest.substr(comma + 1));
    if (!salt || !pepper) return std::nullopt;
    spec.kind = SaltPepper{*salt, *pepper};
  } else if (text.starts_with("gauss:")) {
    const auto sigma = number(text.substr(6));
    if (!sigma) return std::nullopt;
    spec.kind = Gaussian{*sigma};
  } else {
    return std::nullopt;
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  return spec;
}

class NoiseRng {
 public:
  explicit NoiseRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool cached_ = false;
};

/// Per-pixel corruption: +1 salt, -1 pepper, 0 untouched.
inline std::vector<std::int8_t> salt_pepper_sites(const SaltPepper& sp, std::uint64_t seed,
                                                  std::size_t n) {
  NoiseRng rng(seed);
  std::vector<std::int8_t> sites(n, 0);
  for (auto& s : sites) {
    const double u = rng.uniform();
    if (u < sp.p_salt) {
      s = 1;
    } else if (u < sp.p_salt + sp.p_pepper) {
      s = -1;
    }
  }
  return sites;
}

inline Image add_salt_pepper(const Image& img, const NoiseSpec& spec) {
  spec.validate();
  const auto* sp = std::get_if<SaltPepper>(&spec.kind);
  if (sp == nullptr) throw std::invalid_argument("add_salt_pepper: spec is not salt-and-pepper");
  const auto sites = salt_pepper_sites(*sp, spec.seed, img.size());
  Field out = img.field();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (sites[i] > 0) out[i] = 1.0;
    if (sites[i] < 0) out[i] = 0.0;
  }
  return Image(std::move(out));
}

inline Image add_gaussian(const Image& img, const NoiseSpec& spec) {
  spec.validate();
  const auto* g = std::get_if<Gaussian>(&spec.kind);
  if (g == nullptr) throw std::invalid_argument("add_gaussian: spec is not gaussian");
  if (g->sigma == 0.0) return img;
  NoiseRng rng(spec.seed);
  Field out = img.field();
  for (double& v : out.values()) v += g->sigma * rng.normal();
  return Image::clamped(std::move(out));
}

inline Image apply_noise(const Image& img, const NoiseSpec& spec) {
  return std::holds_alternative<SaltPepper>(spec.kind) ? add_salt_pepper(img, spec)
                                                       : add_gaussian(img, spec);
}

enum class LpNorm { L1, L2 };

inline LpNorm norm_for(const CostMode& mode) {
  return mode.kind == CostKind::L2 ? LpNorm::L2 : LpNorm::L1;
}

/// Sum of |f - u| (L1) or its Euclidean counterpart (L2), no area weight.
inline double lp_error(const Image& f, const Image& u, LpNorm p) {
  detail::require_same_shape(f, u, "lp_error");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - u[i];
    acc += p == LpNorm::L1 ? std::abs(d) : d * d;
  }
  return p == LpNorm::L1 ? acc : std::sqrt(acc);
}

/// 40 log-spaced values in [0.01, 5.5].
inline std::vector<double> default_alpha_grid() {
  constexpr int kPoints = 40;
  std::vector<double> grid(kPoints);
  const double lo = std::log(0.01);
  const double hi = std::log(5.5);
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * i / (kPoints - 1));
  }
  grid.front() = 0.01;
  grid.back() = 5.5;
  return grid;
}

struct ExperimentConfig {
  CostMode mode = CostMode::l1();
  ReconRhsMode rhs_mode = ReconRhsMode::HomogeneousZero;
  SolveParams params;
  unsigned threads = 1;
};

struct AlphaTrial {
  double alpha = 0.0;
  double error = 0.0;
};

struct AlphaSearchResult {
  double alpha = 0.0;
  double error = 0.0;
  Mask mask;                       // mask selected at the best alpha
  std::vector<AlphaTrial> trials;  // in grid order
};

/// Error of one compress/decompress cycle, measured against f_clean.
inline AlphaTrial evaluate_alpha(const Image& f_clean, const Image& f_input, MethodTag method,
                                 const Budget& budget, double alpha,
                                 const ExperimentConfig& cfg, Mask* mask_out = nullptr) {
  const auto c = compress(f_input, method, cfg.mode, budget, alpha, cfg.params, cfg.rhs_mode);
  const Image u = decompress(c, cfg.params);
  if (mask_out != nullptr) *mask_out = c.mask;
  return {alpha, lp_error(f_clean, u, norm_for(cfg.mode))};
}

namespace detail {

/// Smallest error; ties go to the smaller alpha. Independent of grid order.
inline std::size_t best_trial(const std::vector<AlphaTrial>& trials) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i) {
    const auto& t = trials[i];
    const auto& b = trials[best];
    if (t.error < b.error || (t.error == b.error && t.alpha < b.alpha)) best = i;
  }
  return best;
}

inline void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("alpha grid is empty");
  for (double a : grid) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("alpha grid values must be finite and > 0");
    }
  }
}

}  // namespace detail

inline AlphaSearchResult alpha_search(const Image& f_clean, const Image& f_input,
                                      MethodTag method, const Budget& budget,
                                      const std::vector<double>& alpha_grid,
                                      const ExperimentConfig& cfg) {
  detail::validate_grid(alpha_grid);
  AlphaSearchResult result;
  result.trials.resize(alpha_grid.size());
  parallel_for(alpha_grid.size(), cfg.threads, [&](std::size_t i) {
    result.trials[i] = evaluate_alpha(f_clean, f_input, method, budget, alpha_grid[i], cfg);
  });
  const auto best = result.trials[detail::best_trial(result.trials)];
  result.alpha = best.alpha;
  result.error = best.error;
  evaluate_alpha(f_clean, f_input, method, budget, best.alpha, cfg, &result.mask);
  return result;
}

struct ExperimentRow {
  std::string noise;
  MethodTag method = MethodTag::AdjH;
  double budget = 0.0;
  double alpha = 0.0;
  double error = 0.0;
  ReconRhsMode rhs_mode = ReconRhsMode::HomogeneousZero;
};

/// Full cross product noise x method x budget, in that nesting order. Every
/// (row, alpha) pair is an independent task; the result does not depend on
/// cfg.threads.
inline std::vector<ExperimentRow> run_table(const Image& f_clean,
                                            const std::vector<NoiseSpec>& noises,
                                            const std::vector<MethodTag>& methods,
                                            const std::vector<double>& budgets,
                                            const std::vector<double>& alpha_grid,
                                            const ExperimentConfig& cfg) {
  detail::validate_grid(alpha_grid);
  std::vector<Budget> budget_list;
  for (double b : budgets) budget_list.emplace_back(b);
  std::vector<Image> noisy;
  for (const auto& n : noises) noisy.push_back(apply_noise(f_clean, n));

  const std::size_t per_noise = methods.size() * budget_list.size();
  const std::size_t rows = noises.size() * per_noise;
  const std::size_t cols = alpha_grid.size();
  std::vector<AlphaTrial> trials(rows * cols);
  parallel_for(rows * cols, cfg.threads, [&](std::size_t task) {
    const std::size_t row = task / cols;
    const std::size_t n = row / per_noise;
    const std::size_t m = (row % per_noise) / budget_list.size();
    const std::size_t b = row % budget_list.size();
    trials[task] = evaluate_alpha(f_clean, noisy[n], methods[m], budget_list[b],
                                  alpha_grid[task % cols], cfg);
  });

  std::vector<ExperimentRow> out;
  out.reserve(rows);
  for (std::size_t row = 0; row < rows; ++row) {
    std::vector<AlphaTrial> slice(trials.begin() + static_cast<std::ptrdiff_t>(row * cols),
                                  trials.begin() + static_cast<std::ptrdiff_t>((row + 1) * cols));
    const auto best = slice[detail::best_trial(slice)];
    const std::size_t n = row / per_noise;
    const std::size_t m = (row % per_noise) / budget_list.size();
    const std::size_t b = row % budget_list.size();
    out.push_back({noises[n].describe(), methods[m], budgets[b], best.alpha, best.error,
                   cfg.rhs_mode});
  }
  return out;
}

namespace detail {

inline std::string sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace detail

/// RFC-4180 CSV with CRLF line ends. Optional "# key=value" lines precede
/// the header.
inline std::string to_csv(const std::vector<ExperimentRow>& rows,
                          const std::vector<std::string>& metadata = {}) {
  std::string out;
  for (const auto& m : metadata) out += "# " + m + "\r\n";
  out += "noise,method,budget,alpha,error\r\n";
  for (const auto& r : rows) {
    out += detail::csv_field(r.noise) + "," + std::string(to_string(r.method)) + "," +
           detail::sig6(r.budget) + "," + detail::sig6(r.alpha) + "," +
           detail::sig6(r.error) + "\r\n";
  }
  return out;
}

/// Fraction of corrupted sites that the mask stores; 0 when nothing is
/// corrupted.
inline double corrupted_fraction_selected(const Mask& mask,
                                          const std::vector<std::int8_t>& sites) {
  std::size_t corrupted = 0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] != 0) {
      ++corrupted;
      if (mask[i]) ++kept;
    }
  }
  return corrupted == 0 ? 0.0 : static_cast<double>(kept) / static_cast<double>(corrupted);
}

}  // namespace topoinpaint
