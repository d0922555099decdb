#pragma once

// Second-order forward jets and type-erased scalar fields.
//
// A Jet2<T> carries the value, gradient and (symmetric) Hessian of a scalar
// with respect to the coordinates of a phase point. Fields are written once as
// generic rules over a "real-like" scalar S (double or Jet2<double>) and the
// ScalarField wrapper instantiates them for plain values and for jets.

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "extkit/errors.hpp"

namespace extkit {

using cplx = std::complex<double>;

/// Largest coordinate count a jet can differentiate against.
inline constexpr std::size_t kMaxJetDim = 8;

namespace detail {

constexpr std::size_t packed_index(std::size_t i, std::size_t j) noexcept {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

template <class S, class T>
concept scalar_for = std::same_as<S, T> || std::is_arithmetic_v<S>;

inline bool finite(double x) noexcept { return std::isfinite(x); }
inline bool finite(const cplx& z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace detail

template <class T>
class Jet2 {
 public:
  using scalar_type = T;

  Jet2() = default;

  /// Constant jet: zero gradient and Hessian.
  Jet2(std::size_t dim, T value) : n_(dim), v_(value) { check_dim(dim); }

  /// Coordinate `index` of a `dim`-dimensional point, seeded with unit gradient.
  static Jet2 variable(std::size_t dim, std::size_t index, T value) {
    Jet2 j(dim, value);
    if (index >= dim) throw DimensionError("jet variable index out of range");
    j.g_[index] = T{1};
    return j;
  }

  std::size_t dim() const noexcept { return n_; }
  const T& value() const noexcept { return v_; }
  T& value() noexcept { return v_; }
  const T& grad(std::size_t i) const noexcept { return g_[i]; }
  T& grad(std::size_t i) noexcept { return g_[i]; }
  const T& hess(std::size_t i, std::size_t j) const noexcept {
    return h_[detail::packed_index(i, j)];
  }
  T& hess(std::size_t i, std::size_t j) noexcept { return h_[detail::packed_index(i, j)]; }

  std::vector<T> gradient() const { return {g_.begin(), g_.begin() + n_}; }

  /// Row-major dim x dim Hessian.
  std::vector<T> hessian() const {
    std::vector<T> out(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] = hess(i, j);
    return out;
  }

  bool is_finite() const noexcept {
    if (!detail::finite(v_)) return false;
    for (std::size_t i = 0; i < n_; ++i)
      if (!detail::finite(g_[i])) return false;
    for (std::size_t k = 0; k < packed_size(); ++k)
      if (!detail::finite(h_[k])) return false;
    return true;
  }

  /// Chain rule for a unary function with derivatives (f0, f1, f2) at value().
  Jet2 chain(T f0, T f1, T f2) const {
    Jet2 r(n_, f0);
    for (std::size_t j = 0; j < n_; ++j) {
      r.g_[j] = f1 * g_[j];
      for (std::size_t i = 0; i <= j; ++i) {
        const std::size_t k = detail::packed_index(i, j);
        r.h_[k] = f1 * h_[k] + f2 * g_[i] * g_[j];
      }
    }
    return r;
  }

  friend Jet2 operator+(const Jet2& a) { return a; }
  friend Jet2 operator-(Jet2 a) {
    a.v_ = -a.v_;
    for (std::size_t i = 0; i < a.n_; ++i) a.g_[i] = -a.g_[i];
    for (std::size_t k = 0; k < a.packed_size(); ++k) a.h_[k] = -a.h_[k];
    return a;
  }

  Jet2& operator+=(const Jet2& b) {
    same_dim(b);
    v_ += b.v_;
    for (std::size_t i = 0; i < n_; ++i) g_[i] += b.g_[i];
    for (std::size_t k = 0; k < packed_size(); ++k) h_[k] += b.h_[k];
    return *this;
  }
  Jet2& operator-=(const Jet2& b) {
    same_dim(b);
    v_ -= b.v_;
    for (std::size_t i = 0; i < n_; ++i) g_[i] -= b.g_[i];
    for (std::size_t k = 0; k < packed_size(); ++k) h_[k] -= b.h_[k];
    return *this;
  }
  Jet2& operator*=(const Jet2& b) {
    same_dim(b);
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t i = 0; i <= j; ++i) {
        const std::size_t k = detail::packed_index(i, j);
        h_[k] = h_[k] * b.v_ + v_ * b.h_[k] + g_[i] * b.g_[j] + g_[j] * b.g_[i];
      }
    for (std::size_t i = 0; i < n_; ++i) g_[i] = g_[i] * b.v_ + v_ * b.g_[i];
    v_ *= b.v_;
    return *this;
  }
  Jet2& operator/=(const Jet2& b) { return *this *= reciprocal(b); }

  template <detail::scalar_for<T> S>
  Jet2& operator+=(const S& s) {
    v_ += s;
    return *this;
  }
  template <detail::scalar_for<T> S>
  Jet2& operator-=(const S& s) {
    v_ -= s;
    return *this;
  }
  template <detail::scalar_for<T> S>
  Jet2& operator*=(const S& s) {
    v_ *= s;
    for (std::size_t i = 0; i < n_; ++i) g_[i] *= s;
    for (std::size_t k = 0; k < packed_size(); ++k) h_[k] *= s;
    return *this;
  }
  template <detail::scalar_for<T> S>
  Jet2& operator/=(const S& s) {
    return *this *= (T{1} / T(s));
  }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
  friend Jet2 operator/(Jet2 a, const Jet2& b) { return a /= b; }

  template <detail::scalar_for<T> S>
  friend Jet2 operator+(Jet2 a, const S& s) { return a += s; }
  template <detail::scalar_for<T> S>
  friend Jet2 operator+(const S& s, Jet2 a) { return a += s; }
  template <detail::scalar_for<T> S>
  friend Jet2 operator-(Jet2 a, const S& s) { return a -= s; }
  template <detail::scalar_for<T> S>
  friend Jet2 operator-(const S& s, const Jet2& a) { return (-a) += s; }
  template <detail::scalar_for<T> S>
  friend Jet2 operator*(Jet2 a, const S& s) { return a *= s; }
  template <detail::scalar_for<T> S>
  friend Jet2 operator*(const S& s, Jet2 a) { return a *= s; }
  template <detail::scalar_for<T> S>
  friend Jet2 operator/(Jet2 a, const S& s) { return a /= s; }
  template <detail::scalar_for<T> S>
  friend Jet2 operator/(const S& s, const Jet2& a) { return reciprocal(a) *= s; }

  friend Jet2 reciprocal(const Jet2& a) {
    const T inv = T{1} / a.v_;
    return a.chain(inv, -inv * inv, T{2} * inv * inv * inv);
  }

 private:
  static void check_dim(std::size_t dim) {
    if (dim > kMaxJetDim) throw DimensionError("jet dimension exceeds kMaxJetDim");
  }
  void same_dim(const Jet2& b) const {
    if (b.n_ != n_) throw DimensionError("jet dimension mismatch");
  }
  std::size_t packed_size() const noexcept { return n_ * (n_ + 1) / 2; }

  std::size_t n_ = 0;
  T v_{};
  std::array<T, kMaxJetDim> g_{};
  std::array<T, kMaxJetDim*(kMaxJetDim + 1) / 2> h_{};
};

using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sinh;
using std::sqrt;
using std::tan;
using std::tanh;

template <class T>
Jet2<T> sin(const Jet2<T>& x) {
  const T s = sin(x.value()), c = cos(x.value());
  return x.chain(s, c, -s);
}
template <class T>
Jet2<T> cos(const Jet2<T>& x) {
  const T s = sin(x.value()), c = cos(x.value());
  return x.chain(c, -s, -c);
}
template <class T>
Jet2<T> tan(const Jet2<T>& x) {
  const T t = tan(x.value());
  const T d = T{1} + t * t;
  return x.chain(t, d, T{2} * t * d);
}
template <class T>
Jet2<T> sinh(const Jet2<T>& x) {
  const T s = sinh(x.value()), c = cosh(x.value());
  return x.chain(s, c, s);
}
template <class T>
Jet2<T> cosh(const Jet2<T>& x) {
  const T s = sinh(x.value()), c = cosh(x.value());
  return x.chain(c, s, c);
}
template <class T>
Jet2<T> tanh(const Jet2<T>& x) {
  const T t = tanh(x.value());
  const T d = T{1} - t * t;
  return x.chain(t, d, T{-2} * t * d);
}
template <class T>
Jet2<T> exp(const Jet2<T>& x) {
  const T e = exp(x.value());
  return x.chain(e, e, e);
}
/// Principal branch for complex T.
template <class T>
Jet2<T> log(const Jet2<T>& x) {
  const T inv = T{1} / x.value();
  return x.chain(log(x.value()), inv, -inv * inv);
}
template <class T>
Jet2<T> sqrt(const Jet2<T>& x) {
  const T r = sqrt(x.value());
  const T d = T{0.5} / r;
  return x.chain(r, d, -d / (T{2} * x.value()));
}
template <class T>
Jet2<T> pow(const Jet2<T>& x, double p) {
  const T v = x.value();
  const T f0 = pow(v, p);
  const T f1 = p * pow(v, p - 1.0);
  const T f2 = p * (p - 1.0) * pow(v, p - 2.0);
  return x.chain(f0, f1, f2);
}
/// Principal branch: exp(p * log(x)).
template <class T>
Jet2<T> pow(const Jet2<T>& x, const Jet2<T>& p) {
  return exp(p * log(x));
}

inline cplx to_complex(double x) { return {x, 0.0}; }
inline cplx to_complex(const cplx& z) { return z; }
inline Jet2<cplx> to_complex(const Jet2<double>& x) {
  Jet2<cplx> r(x.dim(), cplx(x.value()));
  for (std::size_t j = 0; j < x.dim(); ++j) {
    r.grad(j) = x.grad(j);
    for (std::size_t i = 0; i <= j; ++i) r.hess(i, j) = x.hess(i, j);
  }
  return r;
}

inline Jet2<double> real_part(const Jet2<cplx>& z) {
  Jet2<double> r(z.dim(), z.value().real());
  for (std::size_t j = 0; j < z.dim(); ++j) {
    r.grad(j) = z.grad(j).real();
    for (std::size_t i = 0; i <= j; ++i) r.hess(i, j) = z.hess(i, j).real();
  }
  return r;
}

/// Complex counterpart of a real-like scalar: double -> cplx, Jet2<double> -> Jet2<cplx>.
template <class S>
using complex_of_t = decltype(to_complex(std::declval<const S&>()));

/// Constant with the same jet dimension as `like`.
inline double constant_like(double, double value) { return value; }
template <class T>
Jet2<T> constant_like(const Jet2<T>& like, T value) {
  return Jet2<T>(like.dim(), value);
}
template <class T>
Jet2<T> constant_like(const Jet2<T>& like, double value) requires(!std::same_as<T, double>)
{
  return Jet2<T>(like.dim(), T(value));
}
inline cplx constant_like(const cplx&, cplx value) { return value; }

inline double primal(double x) { return x; }
inline cplx primal(const cplx& x) { return x; }
template <class T>
T primal(const Jet2<T>& x) {
  return x.value();
}

// ---------------------------------------------------------------------------
// Phase points and fields
// ---------------------------------------------------------------------------

/// Coordinates of a point on a phase space (canonical or Poisson coordinates).
class PhasePoint {
 public:
  PhasePoint() = default;
  explicit PhasePoint(std::vector<double> coords) : coords_(std::move(coords)) {}
  PhasePoint(std::initializer_list<double> coords) : coords_(coords) {}

  std::size_t size() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  std::span<const double> span() const noexcept { return coords_; }
  const std::vector<double>& coords() const noexcept { return coords_; }
  bool all_finite() const noexcept;

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

 private:
  std::vector<double> coords_;
};

/// Declared singular set of a field: near(x, margin) is true when x lies
/// within `margin` of the set. An empty set is never near.
class SingularSet {
 public:
  using Predicate = std::function<bool(std::span<const double>, double)>;

  SingularSet() = default;
  explicit SingularSet(Predicate near) : near_(std::move(near)) {}

  bool empty() const noexcept { return !near_; }
  bool near(std::span<const double> x, double margin = 0.0) const {
    return near_ && near_(x, margin);
  }

  friend SingularSet operator|(const SingularSet& a, const SingularSet& b);

 private:
  Predicate near_;
};

enum class Codomain { real, complex };

std::string to_string(Codomain c);

class ScalarField {
 public:
  using RealValueFn = std::function<double(std::span<const double>)>;
  using ComplexValueFn = std::function<cplx(std::span<const double>)>;
  using RealJetFn = std::function<Jet2<double>(std::span<const Jet2<double>>)>;
  using ComplexJetFn = std::function<Jet2<cplx>(std::span<const Jet2<double>>)>;

  ScalarField() = default;

  /// `rule(std::span<const S>) -> S` for S in {double, Jet2<double>}.
  template <class Rule>
  static ScalarField real(std::size_t dim, Rule rule, SingularSet singular = {}) {
    RealValueFn value = [rule](std::span<const double> x) -> double { return rule(x); };
    RealJetFn jet = [rule](std::span<const Jet2<double>> x) -> Jet2<double> { return rule(x); };
    return from_real(dim, std::move(value), std::move(jet), std::move(singular));
  }

  /// `rule(std::span<const S>) -> complex_of_t<S>` for S in {double, Jet2<double>}.
  template <class Rule>
  static ScalarField complex(std::size_t dim, Rule rule, SingularSet singular = {}) {
    ComplexValueFn value = [rule](std::span<const double> x) -> cplx { return rule(x); };
    ComplexJetFn jet = [rule](std::span<const Jet2<double>> x) -> Jet2<cplx> { return rule(x); };
    return from_complex(dim, std::move(value), std::move(jet), std::move(singular));
  }

  static ScalarField constant(std::size_t dim, double value);
  /// The coordinate function x -> x[index].
  static ScalarField coordinate(std::size_t dim, std::size_t index);

  static ScalarField from_real(std::size_t dim, RealValueFn value, RealJetFn jet,
                               SingularSet singular);
  static ScalarField from_complex(std::size_t dim, ComplexValueFn value, ComplexJetFn jet,
                                  SingularSet singular);

  bool valid() const noexcept { return static_cast<bool>(impl_); }
  std::size_t dim() const;
  Codomain codomain() const;
  bool is_complex() const { return codomain() == Codomain::complex; }
  const SingularSet& singular_set() const;
  bool singular_at(std::span<const double> x, double margin = 0.0) const;

  /// Unchecked evaluation on raw coordinates (no singular/finite checks).
  double raw_value(std::span<const double> x) const;
  cplx raw_value_complex(std::span<const double> x) const;
  Jet2<double> raw_jet(std::span<const Jet2<double>> x) const;
  Jet2<cplx> raw_jet_complex(std::span<const Jet2<double>> x) const;

  /// Real part of a complex field (identity on real fields).
  ScalarField real_part() const;
  ScalarField imag_part() const;

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(double s, const ScalarField& a);

 private:
  struct Impl {
    std::size_t dim = 0;
    Codomain codomain = Codomain::real;
    SingularSet singular;
    RealValueFn real_value;
    ComplexValueFn complex_value;
    RealJetFn real_jet;
    ComplexJetFn complex_jet;
  };
  explicit ScalarField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const Impl& impl() const;

  std::shared_ptr<const Impl> impl_;
};

/// Value and exact gradient/Hessian of `field` at `x`. T = double requires a
/// real field; T = cplx accepts both codomains.
template <class T = double>
Jet2<T> eval_jet2(const ScalarField& field, const PhasePoint& x);

template <class T = double>
T eval_value(const ScalarField& field, const PhasePoint& x);

/// Seeds the coordinates of `x` as jet variables.
std::vector<Jet2<double>> seed_jets(std::span<const double> x);

extern template Jet2<double> eval_jet2<double>(const ScalarField&, const PhasePoint&);
extern template Jet2<cplx> eval_jet2<cplx>(const ScalarField&, const PhasePoint&);
extern template double eval_value<double>(const ScalarField&, const PhasePoint&);
extern template cplx eval_value<cplx>(const ScalarField&, const PhasePoint&);

}  // namespace extkit
