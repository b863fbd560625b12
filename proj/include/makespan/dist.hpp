#pragma once

// Finitely supported duration distributions and the CDF algebra used by every
// bounding procedure: convolution (sum of independent durations), pointwise
// CDF product (max of independent durations) and pointwise CDF minimum.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/triangular.hpp>

#include "makespan/error.hpp"

namespace makespan {

namespace detail {

// Two support values closer than this (relative) are the same atom. Absorbs
// the last-ulp differences produced by summing durations in different orders.
inline double merge_tolerance(double x) noexcept {
  return 1e-12 * std::max(1.0, std::abs(x));
}

// Masses at or below this are treated as floating-point residue of CDF
// differencing and dropped.
inline constexpr double kMassFloor = 1e-15;

inline constexpr double kQuantileSlack = 1e-12;

}  // namespace detail

struct Atom {
  double value;
  double mass;
};

class DiscreteDistribution {
 public:
  // Validating constructor: support strictly ascending, finite, >= 0; masses
  // positive and summing to 1 within 1e-12.
  DiscreteDistribution(std::vector<double> support, std::vector<double> masses)
      : support_(std::move(support)), masses_(std::move(masses)) {
    if (support_.empty()) {
      throw Error(Errc::invalid_parameters, "distribution needs at least one support point");
    }
    if (support_.size() != masses_.size()) {
      throw Error(Errc::invalid_parameters, "support and masses differ in length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (!std::isfinite(support_[i]) || support_[i] < 0.0) {
        throw Error(Errc::invalid_parameters,
                    "support values must be finite and non-negative");
      }
      if (i > 0 && !(support_[i] > support_[i - 1])) {
        throw Error(Errc::invalid_parameters, "support values must be strictly ascending");
      }
      if (!(masses_[i] > 0.0) || !std::isfinite(masses_[i])) {
        throw Error(Errc::invalid_parameters, "masses must be positive");
      }
      total += masses_[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw Error(Errc::invalid_parameters, "masses must sum to 1");
    }
    build_cumulative();
  }

  // Sorts, merges coincident values, drops non-positive masses and
  // renormalizes. Use for results of arithmetic, not for user input.
  static DiscreteDistribution from_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& l, const Atom& r) { return l.value < r.value; });
    std::vector<double> support;
    std::vector<double> masses;
    support.reserve(atoms.size());
    masses.reserve(atoms.size());
    for (const Atom& atom : atoms) {
      if (!support.empty() &&
          atom.value - support.back() <= detail::merge_tolerance(support.back())) {
        masses.back() += atom.mass;
      } else {
        support.push_back(atom.value);
        masses.push_back(atom.mass);
      }
    }
    return finish(std::move(support), std::move(masses));
  }

  static DiscreteDistribution point_mass(double value) {
    return DiscreteDistribution({value}, {1.0});
  }

  std::size_t size() const noexcept { return support_.size(); }
  std::span<const double> support() const noexcept { return support_; }
  std::span<const double> masses() const noexcept { return masses_; }
  double min() const noexcept { return support_.front(); }
  double max() const noexcept { return support_.back(); }
  bool is_point_mass() const noexcept { return support_.size() == 1; }

  // Right-continuous CDF.
  double cdf(double t) const noexcept {
    const auto it = std::upper_bound(support_.begin(), support_.end(),
                                     t + detail::merge_tolerance(t));
    if (it == support_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
  }

  // Smallest support value whose CDF reaches q.
  double quantile(double q) const noexcept {
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(),
                                     q - detail::kQuantileSlack);
    if (it == cumulative_.end()) return support_.back();
    return support_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

  double mean() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m += support_[i] * masses_[i];
    return m;
  }

  double variance() const noexcept {
    const double m = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      const double d = support_[i] - m;
      v += d * d * masses_[i];
    }
    return v;
  }

  std::span<const double> cumulative() const noexcept { return cumulative_; }

  friend bool operator==(const DiscreteDistribution& l, const DiscreteDistribution& r) {
    return l.support_ == r.support_ && l.masses_ == r.masses_;
  }

 private:
  struct Unchecked {};
  DiscreteDistribution(Unchecked, std::vector<double> support, std::vector<double> masses)
      : support_(std::move(support)), masses_(std::move(masses)) {
    build_cumulative();
  }

  static DiscreteDistribution finish(std::vector<double> support, std::vector<double> masses) {
    std::size_t kept = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (masses[i] > detail::kMassFloor) {
        support[kept] = support[i];
        masses[kept] = masses[i];
        total += masses[i];
        ++kept;
      }
    }
    if (kept == 0) {
      throw Error(Errc::invalid_parameters, "distribution has no positive mass");
    }
    support.resize(kept);
    masses.resize(kept);
    for (double& m : masses) m /= total;
    if (!std::isfinite(support.front()) || !std::isfinite(support.back()) ||
        support.front() < 0.0) {
      throw Error(Errc::invalid_parameters, "support values must be finite and non-negative");
    }
    return DiscreteDistribution(Unchecked{}, std::move(support), std::move(masses));
  }

  void build_cumulative() {
    cumulative_.resize(masses_.size());
    std::partial_sum(masses_.begin(), masses_.end(), cumulative_.begin());
    cumulative_.back() = 1.0;
  }

  std::vector<double> support_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

// Direction in which re-discretization moves probability mass. `up` never
// lowers a quantile (stochastically larger result), `down` never raises one.
enum class Rounding { up, down, nearest };

constexpr std::string_view to_string(Rounding r) noexcept {
  switch (r) {
    case Rounding::up: return "up";
    case Rounding::down: return "down";
    case Rounding::nearest: return "nearest";
  }
  return "nearest";
}

struct DiscretizationConfig {
  std::size_t sp = 50;
  double tail_mass = 1e-4;
  Rounding rounding = Rounding::nearest;

  void validate() const {
    if (sp < 1) throw Error(Errc::invalid_parameters, "sp must be >= 1");
    if (!(tail_mass > 0.0 && tail_mass < 0.5)) {
      throw Error(Errc::invalid_parameters, "tail mass must lie in (0, 0.5)");
    }
  }

  DiscretizationConfig with(Rounding r) const {
    DiscretizationConfig copy = *this;
    copy.rounding = r;
    return copy;
  }
};

enum class Family {
  deterministic,
  uniform,
  triangular,
  normal,
  exponential,
  beta_three_point,
  explicit_discrete,
};

constexpr std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::deterministic: return "deterministic";
    case Family::uniform: return "uniform";
    case Family::triangular: return "triangular";
    case Family::normal: return "normal";
    case Family::exponential: return "exponential";
    case Family::beta_three_point: return "beta-three-point";
    case Family::explicit_discrete: return "explicit-discrete";
  }
  return "deterministic";
}

inline std::optional<Family> parse_family(std::string_view name) noexcept {
  for (Family f : {Family::deterministic, Family::uniform, Family::triangular, Family::normal,
                   Family::exponential, Family::beta_three_point, Family::explicit_discrete}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

struct Deterministic {
  double value;
};
struct Uniform {
  double min, max;
};
struct Triangular {
  double min, mode, max;
};
struct Normal {
  double mean, std_dev;
};
struct Exponential {
  double scale;
};
// PERT beta on [optimistic, pessimistic] with shape parameters
// 1 + 4 (m - a) / (b - a) and 1 + 4 (b - m) / (b - a), mean (a + 4m + b) / 6.
struct BetaThreePoint {
  double optimistic, most_likely, pessimistic;
};
struct ExplicitDiscrete {
  DiscreteDistribution distribution;
};

// Activity duration model. Instances are validated on construction, so every
// DurationSpec in circulation satisfies its family constraints.
class DurationSpec {
 public:
  using Params = std::variant<Deterministic, Uniform, Triangular, Normal, Exponential,
                              BetaThreePoint, ExplicitDiscrete>;

  static DurationSpec deterministic(double value) { return DurationSpec(Deterministic{value}); }
  static DurationSpec uniform(double min, double max) { return DurationSpec(Uniform{min, max}); }
  static DurationSpec triangular(double min, double mode, double max) {
    return DurationSpec(Triangular{min, mode, max});
  }
  static DurationSpec normal(double mean, double std_dev) {
    return DurationSpec(Normal{mean, std_dev});
  }
  static DurationSpec exponential(double scale) { return DurationSpec(Exponential{scale}); }
  static DurationSpec beta_three_point(double optimistic, double most_likely,
                                       double pessimistic) {
    return DurationSpec(BetaThreePoint{optimistic, most_likely, pessimistic});
  }
  static DurationSpec explicit_discrete(DiscreteDistribution d) {
    return DurationSpec(ExplicitDiscrete{std::move(d)});
  }

  Family family() const noexcept { return static_cast<Family>(params_.index()); }
  const Params& params() const noexcept { return params_; }

  double mean() const {
    return std::visit(
        [](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Deterministic>) return p.value;
          if constexpr (std::is_same_v<T, Uniform>) return 0.5 * (p.min + p.max);
          if constexpr (std::is_same_v<T, Triangular>) return (p.min + p.mode + p.max) / 3.0;
          if constexpr (std::is_same_v<T, Normal>) return p.mean;
          if constexpr (std::is_same_v<T, Exponential>) return p.scale;
          if constexpr (std::is_same_v<T, BetaThreePoint>)
            return (p.optimistic + 4.0 * p.most_likely + p.pessimistic) / 6.0;
          if constexpr (std::is_same_v<T, ExplicitDiscrete>) return p.distribution.mean();
        },
        params_);
  }

  double variance() const {
    return std::visit(
        [](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Deterministic>) return 0.0;
          if constexpr (std::is_same_v<T, Uniform>) return (p.max - p.min) * (p.max - p.min) / 12.0;
          if constexpr (std::is_same_v<T, Triangular>) {
            const double a = p.min, c = p.mode, b = p.max;
            return (a * a + b * b + c * c - a * b - a * c - b * c) / 18.0;
          }
          if constexpr (std::is_same_v<T, Normal>) return p.std_dev * p.std_dev;
          if constexpr (std::is_same_v<T, Exponential>) return p.scale * p.scale;
          if constexpr (std::is_same_v<T, BetaThreePoint>) {
            const auto [alpha, beta] = beta_shapes(p);
            const double w = p.pessimistic - p.optimistic;
            const double s = alpha + beta;
            return alpha * beta * w * w / (s * s * (s + 1.0));
          }
          if constexpr (std::is_same_v<T, ExplicitDiscrete>) return p.distribution.variance();
        },
        params_);
  }

  bool bounded_below() const noexcept { return family() != Family::normal; }
  bool bounded_above() const noexcept {
    return family() != Family::normal && family() != Family::exponential;
  }

  // Inverse CDF for the continuous families, clamped at 0 since durations
  // are non-negative. Point-mass and explicit families answer from their atoms.
  double quantile(double p) const {
    return std::visit(
        [p](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          namespace bm = boost::math;
          if constexpr (std::is_same_v<T, Deterministic>) return d.value;
          if constexpr (std::is_same_v<T, Uniform>) return d.min + p * (d.max - d.min);
          if constexpr (std::is_same_v<T, Triangular>)
            return bm::quantile(bm::triangular_distribution<double>(d.min, d.mode, d.max), p);
          if constexpr (std::is_same_v<T, Normal>)
            return std::max(0.0, bm::quantile(bm::normal_distribution<double>(d.mean, d.std_dev), p));
          if constexpr (std::is_same_v<T, Exponential>)
            return bm::quantile(bm::exponential_distribution<double>(1.0 / d.scale), p);
          if constexpr (std::is_same_v<T, BetaThreePoint>) {
            const auto [alpha, beta] = beta_shapes(d);
            const double x = bm::quantile(bm::beta_distribution<double>(alpha, beta), p);
            return d.optimistic + x * (d.pessimistic - d.optimistic);
          }
          if constexpr (std::is_same_v<T, ExplicitDiscrete>) return d.distribution.quantile(p);
        },
        params_);
  }

  static std::pair<double, double> beta_shapes(const BetaThreePoint& p) noexcept {
    const double w = p.pessimistic - p.optimistic;
    return {1.0 + 4.0 * (p.most_likely - p.optimistic) / w,
            1.0 + 4.0 * (p.pessimistic - p.most_likely) / w};
  }

 private:
  explicit DurationSpec(Params params) : params_(std::move(params)) { validate(); }

  void validate() const {
    const auto finite_nonneg = [](std::initializer_list<double> xs) {
      for (double x : xs) {
        if (!std::isfinite(x) || x < 0.0) {
          throw Error(Errc::invalid_parameters, "duration parameters must be finite and >= 0");
        }
      }
    };
    const auto ordered = [](double lo, double mid, double hi) {
      if (!(lo <= mid && mid <= hi)) {
        throw Error(Errc::invalid_parameters, "parameters must satisfy min <= mode <= max");
      }
      if (lo == hi) throw Error(Errc::degenerate_support, "zero-width continuous duration");
    };
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Deterministic>) {
            finite_nonneg({p.value});
          } else if constexpr (std::is_same_v<T, Uniform>) {
            finite_nonneg({p.min, p.max});
            ordered(p.min, p.min, p.max);
          } else if constexpr (std::is_same_v<T, Triangular>) {
            finite_nonneg({p.min, p.mode, p.max});
            ordered(p.min, p.mode, p.max);
          } else if constexpr (std::is_same_v<T, Normal>) {
            if (!std::isfinite(p.mean) || p.mean < 0.0 || !std::isfinite(p.std_dev) ||
                p.std_dev < 0.0) {
              throw Error(Errc::invalid_parameters, "normal needs mean >= 0 and std_dev >= 0");
            }
            if (p.std_dev == 0.0) throw Error(Errc::degenerate_support, "normal with zero std_dev");
          } else if constexpr (std::is_same_v<T, Exponential>) {
            if (!std::isfinite(p.scale) || !(p.scale > 0.0)) {
              throw Error(Errc::invalid_parameters, "exponential scale must be > 0");
            }
          } else if constexpr (std::is_same_v<T, BetaThreePoint>) {
            finite_nonneg({p.optimistic, p.most_likely, p.pessimistic});
            ordered(p.optimistic, p.most_likely, p.pessimistic);
          }
        },
        params_);
  }

  Params params_;
};

// Collapses d onto at most sp atoms of equal mass 1/sp. Bucket i covers the
// cumulative-probability slice (i/sp, (i+1)/sp]; its mass goes to the slice's
// top quantile (up), bottom quantile (down) or midpoint quantile (nearest).
// With up the result CDF is floor(sp F)/sp <= F; with down ceil(sp F)/sp >= F.
inline DiscreteDistribution rediscretize(const DiscreteDistribution& d, std::size_t sp,
                                         Rounding rounding) {
  if (sp == 0) throw Error(Errc::invalid_parameters, "sp must be >= 1");
  if (d.size() <= sp) return d;
  const auto cum = d.cumulative();
  const auto support = d.support();
  const double step = 1.0 / static_cast<double>(sp);
  std::vector<Atom> atoms;
  atoms.reserve(sp);
  for (std::size_t i = 0; i < sp; ++i) {
    double value = 0.0;
    switch (rounding) {
      case Rounding::up:
        value = d.quantile(static_cast<double>(i + 1) * step);
        break;
      case Rounding::nearest:
        value = d.quantile((static_cast<double>(i) + 0.5) * step);
        break;
      case Rounding::down: {
        const double floor_q = static_cast<double>(i) * step + detail::kQuantileSlack;
        const auto it = std::upper_bound(cum.begin(), cum.end(), floor_q);
        value = it == cum.end() ? support.back()
                                : support[static_cast<std::size_t>(it - cum.begin())];
        break;
      }
    }
    atoms.push_back({value, step});
  }
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

inline DiscreteDistribution discretize(const DurationSpec& spec, const DiscretizationConfig& cfg) {
  cfg.validate();
  if (const auto* det = std::get_if<Deterministic>(&spec.params())) {
    return DiscreteDistribution::point_mass(det->value);
  }
  if (const auto* ex = std::get_if<ExplicitDiscrete>(&spec.params())) {
    return rediscretize(ex->distribution, cfg.sp, cfg.rounding);
  }
  // Equal-probability slices of [lo, hi]; unbounded tails lose tail_mass each.
  const double lo = spec.bounded_below() ? 0.0 : cfg.tail_mass;
  const double hi = spec.bounded_above() ? 1.0 : 1.0 - cfg.tail_mass;
  const double width = (hi - lo) / static_cast<double>(cfg.sp);
  const double offset = cfg.rounding == Rounding::up     ? 1.0
                        : cfg.rounding == Rounding::down ? 0.0
                                                         : 0.5;
  std::vector<Atom> atoms;
  atoms.reserve(cfg.sp);
  const double mass = 1.0 / static_cast<double>(cfg.sp);
  for (std::size_t i = 0; i < cfg.sp; ++i) {
    const double p = std::clamp(lo + (static_cast<double>(i) + offset) * width, 0.0, 1.0);
    atoms.push_back({spec.quantile(p), mass});
  }
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

namespace detail {

inline DiscreteDistribution exact_convolution(const DiscreteDistribution& a,
                                              const DiscreteDistribution& b) {
  const auto as = a.support(), am = a.masses();
  const auto bs = b.support(), bm = b.masses();
  std::vector<Atom> atoms;
  atoms.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      atoms.push_back({as[i] + bs[j], am[i] * bm[j]});
    }
  }
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

// Evaluates both CDFs on the union of supports and rebuilds a distribution
// from combine(Fa(t), Fb(t)).
template <typename Combine>
DiscreteDistribution combine_cdfs(const DiscreteDistribution& a, const DiscreteDistribution& b,
                                  Combine combine) {
  const auto as = a.support(), bs = b.support();
  const auto ac = a.cumulative(), bc = b.cumulative();
  std::vector<Atom> atoms;
  atoms.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, previous = 0.0;
  while (i < as.size() || j < bs.size()) {
    double t;
    if (j == bs.size() || (i < as.size() && as[i] < bs[j])) {
      t = as[i];
    } else {
      t = bs[j];
    }
    const double tol = merge_tolerance(t);
    while (i < as.size() && as[i] <= t + tol) fa = ac[i++];
    while (j < bs.size() && bs[j] <= t + tol) fb = bc[j++];
    const double g = combine(fa, fb);
    if (g > previous) {
      atoms.push_back({t, g - previous});
      previous = g;
    }
  }
  return DiscreteDistribution::from_atoms(std::move(atoms));
}

}  // namespace detail

// Distribution of A + B for independent A, B. Exact while the pairwise
// support product stays within sp^2; beyond that, operands and result are
// re-discretized to sp atoms in the configured rounding direction.
inline DiscreteDistribution convolve(const DiscreteDistribution& a, const DiscreteDistribution& b,
                                     const DiscretizationConfig& cfg) {
  if (a.is_point_mass() || b.is_point_mass()) {
    const double shift = a.is_point_mass() ? a.min() : b.min();
    const DiscreteDistribution& other = a.is_point_mass() ? b : a;
    std::vector<Atom> atoms;
    atoms.reserve(other.size());
    for (std::size_t i = 0; i < other.size(); ++i) {
      atoms.push_back({other.support()[i] + shift, other.masses()[i]});
    }
    auto shifted = DiscreteDistribution::from_atoms(std::move(atoms));
    if (other.size() <= cfg.sp * cfg.sp) return shifted;
    return rediscretize(shifted, cfg.sp, cfg.rounding);
  }
  const std::size_t limit = cfg.sp * cfg.sp;
  if (a.size() * b.size() <= limit) return detail::exact_convolution(a, b);
  const auto left = rediscretize(a, cfg.sp, cfg.rounding);
  const auto right = rediscretize(b, cfg.sp, cfg.rounding);
  return rediscretize(detail::exact_convolution(left, right), cfg.sp, cfg.rounding);
}

// Distribution of max(A, B) for independent A, B: CDF = Fa * Fb.
inline DiscreteDistribution cdf_product(const DiscreteDistribution& a,
                                        const DiscreteDistribution& b) {
  return detail::combine_cdfs(a, b, [](double x, double y) { return x * y; });
}

// CDF = min(Fa, Fb); stochastically no smaller than either operand.
inline DiscreteDistribution cdf_min(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  return detail::combine_cdfs(a, b, [](double x, double y) { return std::min(x, y); });
}

struct Summary {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (probability, value)

  double std_dev() const noexcept { return std::sqrt(variance); }
};

inline Summary summarize(const DiscreteDistribution& d,
                         std::span<const double> probabilities = {}) {
  static constexpr std::array<double, 3> kDefault{0.05, 0.5, 0.95};
  if (probabilities.empty()) probabilities = kDefault;
  Summary s{d.mean(), d.variance(), {}};
  for (double q : probabilities) {
    if (!(q > 0.0 && q < 1.0)) {
      throw Error(Errc::invalid_parameters, "quantile probability must lie in (0, 1)");
    }
    s.quantiles.emplace_back(q, d.quantile(q));
  }
  return s;
}

// First-order stochastic ordering of a relative to b.
enum class StochasticOrder { equal, a_smaller, b_smaller, incomparable };

constexpr std::string_view to_string(StochasticOrder o) noexcept {
  switch (o) {
    case StochasticOrder::equal: return "equal";
    case StochasticOrder::a_smaller: return "a-smaller";
    case StochasticOrder::b_smaller: return "b-smaller";
    case StochasticOrder::incomparable: return "incomparable";
  }
  return "incomparable";
}

// a is stochastically smaller than b when Fa(t) >= Fb(t) - tol on the union
// of both supports.
inline StochasticOrder dominates(const DiscreteDistribution& a, const DiscreteDistribution& b,
                                 double tol) {
  if (tol < 0.0) throw Error(Errc::invalid_parameters, "tolerance must be >= 0");
  bool a_le = true, b_le = true;
  const auto check = [&](double t) {
    const double fa = a.cdf(t), fb = b.cdf(t);
    if (fa < fb - tol) a_le = false;
    if (fb < fa - tol) b_le = false;
  };
  for (double t : a.support()) check(t);
  for (double t : b.support()) check(t);
  if (a_le && b_le) return StochasticOrder::equal;
  if (a_le) return StochasticOrder::a_smaller;
  if (b_le) return StochasticOrder::b_smaller;
  return StochasticOrder::incomparable;
}

}  // namespace makespan
