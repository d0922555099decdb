#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "extkit/diffkit.hpp"

namespace extkit {

/// Dense dim x dim matrix of scalars, row-major.
template <class S>
class Bivector {
 public:
  Bivector() = default;
  Bivector(std::size_t dim, const S& zero) : n_(dim), e_(dim * dim, zero) {}

  std::size_t dim() const noexcept { return n_; }
  S& operator()(std::size_t i, std::size_t j) { return e_[i * n_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return e_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<S> e_;
};

/// canonical: constant ((0, I), (-I, 0)) in (q..., p...) order.
/// constant: any other constant matrix (e.g. the extension of a canonical one).
/// custom: coordinate-dependent bivector.
enum class StructureKind { canonical, constant, custom };

std::string to_string(StructureKind kind);

class PoissonStructure {
 public:
  using ValueRule = std::function<Bivector<double>(std::span<const double>)>;
  using JetRule = std::function<Bivector<Jet2<double>>(std::span<const Jet2<double>>)>;

  PoissonStructure() = default;

  static PoissonStructure canonical(std::size_t dim);

  /// `rule(std::span<const S>) -> Bivector<S>` for S in {double, Jet2<double>}.
  /// The rule must fill the full matrix; antisymmetry is checked on evaluation.
  template <class Rule>
  static PoissonStructure custom(std::size_t dim, Rule rule) {
    ValueRule value = [rule](std::span<const double> x) { return rule(x); };
    JetRule jet = [rule](std::span<const Jet2<double>> x) { return rule(x); };
    return from_rules(dim, StructureKind::custom, std::move(value), std::move(jet));
  }

  static PoissonStructure from_rules(std::size_t dim, StructureKind kind, ValueRule value,
                                     JetRule jet);

  std::size_t dim() const;
  StructureKind kind() const;
  bool is_constant() const { return kind() != StructureKind::custom; }

  /// pi(x); throws DomainError if |pi + pi^T| exceeds 1e-14 entrywise.
  Bivector<double> at(std::span<const double> x) const;
  /// Entries of pi as jets in the coordinates of x (order-1 data is what the
  /// bracket derivatives consume).
  Bivector<Jet2<double>> jet_at(std::span<const Jet2<double>> x) const;

  /// pi(x) * w.
  std::vector<double> apply(std::span<const double> x, std::span<const double> w) const;

 private:
  struct Impl {
    std::size_t dim = 0;
    StructureKind kind = StructureKind::custom;
    ValueRule value;
    JetRule jet;
  };
  explicit PoissonStructure(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const Impl& impl() const;

  std::shared_ptr<const Impl> impl_;
};

/// Structure on (u, p_u, x...) with the canonical pair block on (u, p_u),
/// `base` on the rest and zero off-diagonal blocks.
PoissonStructure extend_structure(const PoissonStructure& base);

struct HamiltonianSystem {
  HamiltonianSystem() = default;
  HamiltonianSystem(PoissonStructure structure, ScalarField hamiltonian,
                    std::map<std::string, ScalarField> observables = {});

  std::size_t dim() const { return structure.dim(); }
  /// Union of the Hamiltonian's singular set with any declared phase-space
  /// restriction.
  bool singular_at(std::span<const double> x, double margin = 0.0) const;

  PoissonStructure structure;
  ScalarField hamiltonian;
  std::map<std::string, ScalarField> observables;
};

/// X_L = pi * dL at x.
std::vector<double> ham_vector_field(const HamiltonianSystem& sys, const PhasePoint& x);

/// {F, G}(x) = dF . pi dG.
template <class T = double>
T bracket(const PoissonStructure& structure, const ScalarField& f, const ScalarField& g,
          const PhasePoint& x);

/// X_L F = dF . pi dL = {F, L}.
template <class T = double>
T apply_XL(const HamiltonianSystem& sys, const ScalarField& f, const PhasePoint& x);

/// X_L(X_L F), assembled from the jets of F, L and pi.
template <class T = double>
T apply_XL2(const HamiltonianSystem& sys, const ScalarField& f, const PhasePoint& x);

/// Cyclic sum {F,{G,H}} + {G,{H,F}} + {H,{F,G}} at x (real fields).
double jacobi_residual(const PoissonStructure& structure, const ScalarField& f,
                       const ScalarField& g, const ScalarField& h, const PhasePoint& x);

extern template double bracket<double>(const PoissonStructure&, const ScalarField&,
                                       const ScalarField&, const PhasePoint&);
extern template cplx bracket<cplx>(const PoissonStructure&, const ScalarField&,
                                   const ScalarField&, const PhasePoint&);
extern template double apply_XL<double>(const HamiltonianSystem&, const ScalarField&,
                                        const PhasePoint&);
extern template cplx apply_XL<cplx>(const HamiltonianSystem&, const ScalarField&,
                                    const PhasePoint&);
extern template double apply_XL2<double>(const HamiltonianSystem&, const ScalarField&,
                                         const PhasePoint&);
extern template cplx apply_XL2<cplx>(const HamiltonianSystem&, const ScalarField&,
                                     const PhasePoint&);

}  // namespace extkit
