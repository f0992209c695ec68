#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lnum/errors.hpp"
#include "lnum/rng.hpp"

namespace lnum {

// Concave nondecreasing utility families. All satisfy f(0) = 0 on [0, B].
enum class UtilityFamily { Linear, Sqrt, Quadratic, Log };

inline const char* family_name(UtilityFamily f) {
  switch (f) {
    case UtilityFamily::Linear: return "linear";
    case UtilityFamily::Sqrt: return "sqrt";
    case UtilityFamily::Quadratic: return "quadratic";
    case UtilityFamily::Log: return "log";
  }
  return "?";
}

inline UtilityFamily family_from_name(const std::string& s) {
  if (s == "linear") return UtilityFamily::Linear;
  if (s == "sqrt") return UtilityFamily::Sqrt;
  if (s == "quadratic") return UtilityFamily::Quadratic;
  if (s == "log") return UtilityFamily::Log;
  throw ConfigError("unknown utility family: " + s);
}

struct UtilityFn {
  UtilityFamily family = UtilityFamily::Linear;
  double a = 1.0;
  double b = 0.0;  // unused for the linear family

  double value(double r) const {
    switch (family) {
      case UtilityFamily::Linear: return a * r;
      case UtilityFamily::Sqrt: return a * (std::sqrt(r + b) - std::sqrt(b));
      case UtilityFamily::Quadratic: return -a * r * r + b * r;
      case UtilityFamily::Log: return a * std::log(b * r + 1.0);
    }
    return 0.0;
  }

  // Closed-form derivative; right derivative at kinks/range ends. May be
  // +inf at r = 0 for sqrt with b = 0.
  double derivative(double r) const {
    switch (family) {
      case UtilityFamily::Linear: return a;
      case UtilityFamily::Sqrt: {
        double d = r + b;
        if (d <= 0.0) return std::numeric_limits<double>::infinity();
        return a / (2.0 * std::sqrt(d));
      }
      case UtilityFamily::Quadratic: return -2.0 * a * r + b;
      case UtilityFamily::Log: return a * b / (b * r + 1.0);
    }
    return 0.0;
  }
};

// Per-class utilities plus the global bounds the policies and the oracle
// rely on: D = max |f| on [0,B], L = Lipschitz constant, and the observation
// noise level (uniform on [-eps, eps], revealed only at delivery time).
class UtilitySpec {
 public:
  UtilitySpec() = default;

  UtilitySpec(std::vector<UtilityFn> fns, double size_bound, double noise_level = 0.0)
      : fns_(std::move(fns)), size_bound_(size_bound), noise_(noise_level) {
    if (size_bound_ <= 0.0) throw ConfigError("size bound must be positive");
    if (noise_ < 0.0) throw ConfigError("noise level must be nonnegative");
    validate_families();
    compute_bounds();
    grid_verify();
  }

  int num_classes() const { return static_cast<int>(fns_.size()); }
  double size_bound() const { return size_bound_; }
  double noise_level() const { return noise_; }
  double value_bound() const { return value_bound_; }   // D
  double lipschitz() const { return lipschitz_; }       // L
  const UtilityFn& fn(int k) const { return fns_.at(static_cast<std::size_t>(k)); }

  UtilitySpec with_noise(double eps) const {
    UtilitySpec copy = *this;
    if (eps < 0.0) throw ConfigError("noise level must be nonnegative");
    copy.noise_ = eps;
    return copy;
  }

  // Exact, noiseless f_k(r).
  double evaluate(int k, double r) const {
    check_domain(r);
    return fns_[static_cast<std::size_t>(k)].value(r);
  }

  // What a delivered job reveals: f_k(r) plus uniform noise on [-eps, eps].
  double observe(int k, double r, Rng& rng) const {
    double v = evaluate(k, r);
    if (noise_ > 0.0) v += rng.uniform(-noise_, noise_);
    return v;
  }

  // Oracle-side only; policies never see this.
  double analytic_gradient(int k, double r) const {
    check_domain(r);
    return fns_[static_cast<std::size_t>(k)].derivative(r);
  }

 private:
  void check_domain(double r) const {
    if (!(r >= -1e-12 && r <= size_bound_ + 1e-12))
      throw DomainError("utility argument outside [0, B]");
  }

  void validate_families() const {
    if (fns_.empty()) throw ConfigError("utility spec needs at least one class");
    for (const auto& f : fns_) {
      if (f.a < 0.0) throw ConfigError("utility parameter a must be nonnegative");
      switch (f.family) {
        case UtilityFamily::Linear:
          break;
        case UtilityFamily::Sqrt:
        case UtilityFamily::Log:
          if (f.b < 0.0) throw ConfigError("utility parameter b must be nonnegative");
          break;
        case UtilityFamily::Quadratic:
          // nondecreasing on [0,B] needs f'(B) = b - 2aB >= 0
          if (f.b - 2.0 * f.a * size_bound_ < -1e-12)
            throw ConfigError("quadratic utility not nondecreasing on [0,B]: need b >= 2aB");
          break;
      }
    }
  }

  void compute_bounds() {
    value_bound_ = 0.0;
    lipschitz_ = 0.0;
    const int grid = 2000;
    for (const auto& f : fns_) {
      // concave nondecreasing with f(0)=0: D attained at B
      value_bound_ = std::max(value_bound_, std::abs(f.value(size_bound_)));
      // f' nonincreasing, so L = f'(0) when finite; sqrt with b=0 has an
      // unbounded derivative at 0 and falls back to the steepest grid secant.
      double d0 = f.derivative(0.0);
      if (std::isfinite(d0)) {
        lipschitz_ = std::max(lipschitz_, d0);
      } else {
        double h = size_bound_ / grid;
        lipschitz_ = std::max(lipschitz_, (f.value(h) - f.value(0.0)) / h);
      }
    }
  }

  // Construction-time sanity sweep: boundedness and Lipschitz on a 1e3 grid.
  void grid_verify() const {
    const int n = 1000;
    double h = size_bound_ / n;
    for (const auto& f : fns_) {
      double prev = f.value(0.0);
      for (int i = 1; i <= n; ++i) {
        double v = f.value(i * h);
        if (std::abs(v) > value_bound_ + 1e-9)
          throw ConfigError("utility exceeds its value bound on [0,B]");
        if (std::abs(v - prev) > lipschitz_ * h + 1e-9)
          throw ConfigError("utility violates its Lipschitz bound on [0,B]");
        if (v + 1e-12 < prev)
          throw ConfigError("utility is decreasing on [0,B]");
        prev = v;
      }
    }
  }

  std::vector<UtilityFn> fns_;
  double size_bound_ = 1.0;
  double noise_ = 0.0;
  double value_bound_ = 0.0;
  double lipschitz_ = 0.0;
};

}  // namespace lnum
