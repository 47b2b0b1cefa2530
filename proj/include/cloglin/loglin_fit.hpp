#pragma once

// Maximum-likelihood fitting of no-causal loglinear models to a 2x2x2 table.
//
// Parameters use the dummy code: every parameter with an index at level 0
// equals 1 (additive form: 0), so each term keeps a single free value, the
// one at all-ones levels. The additive parameter vector is ordered
//   eta, X, Z, Y, XZ, XY, ZY, XZY
// and a model's design matrix uses the same column order restricted to its
// terms, with the intercept first.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cloglin/errors.hpp"
#include "cloglin/table.hpp"

namespace cloglin {

inline constexpr std::size_t kTerms = 8;

inline constexpr std::array<VarSet, kTerms> kTermOrder{
    VarSet{},
    VarSet{Var::X},
    VarSet{Var::Z},
    VarSet{Var::Y},
    VarSet{Var::X, Var::Z},
    VarSet{Var::X, Var::Y},
    VarSet{Var::Z, Var::Y},
    VarSet{Var::X, Var::Z, Var::Y},
};

namespace term {
inline constexpr VarSet eta{};
inline constexpr VarSet X{Var::X};
inline constexpr VarSet Z{Var::Z};
inline constexpr VarSet Y{Var::Y};
inline constexpr VarSet XZ{Var::X, Var::Z};
inline constexpr VarSet XY{Var::X, Var::Y};
inline constexpr VarSet ZY{Var::Z, Var::Y};
inline constexpr VarSet XZY{Var::X, Var::Z, Var::Y};
}  // namespace term

inline constexpr std::size_t term_position(VarSet t) {
  for (std::size_t i = 0; i < kTerms; ++i)
    if (kTermOrder[i] == t) return i;
  return kTerms;
}

inline std::optional<VarSet> term_from_name(std::string_view name) {
  for (VarSet t : kTermOrder)
    if (t.name() == name) return t;
  return std::nullopt;
}

class ModelSpec {
 public:
  // Hierarchical model over `variables`: every singleton of `variables` is
  // included automatically; `terms` lists the interactions.
  ModelSpec(VarSet variables, std::vector<VarSet> interactions) : variables_(variables) {
    if (variables.empty()) throw InputError("model must involve at least one variable");
    for (Var v : kVariables)
      if (variables.contains(v)) terms_.push_back(VarSet{v});
    for (VarSet t : interactions) {
      if (t.size() < 2) continue;
      if (!variables.contains(t)) throw InputError("term " + t.name() + " uses a variable outside the model");
      if (std::find(terms_.begin(), terms_.end(), t) == terms_.end()) terms_.push_back(t);
    }
    for (VarSet t : terms_) {
      for (Var v : kVariables) {
        if (!t.contains(v) || t.size() < 2) continue;
        const VarSet sub = t.without(v);
        if (std::find(terms_.begin(), terms_.end(), sub) == terms_.end())
          throw InputError("model is not hierarchical: " + t.name() + " present without " + sub.name());
      }
    }
    std::sort(terms_.begin(), terms_.end(),
              [](VarSet a, VarSet b) { return term_position(a) < term_position(b); });
  }

  // count ~ .^2
  static ModelSpec two_way() { return ModelSpec(term::XZY, {term::XZ, term::XY, term::ZY}); }
  // count ~ .^3
  static ModelSpec saturated() { return ModelSpec(term::XZY, {term::XZ, term::XY, term::ZY, term::XZY}); }

  VarSet variables() const { return variables_; }
  // Non-intercept terms in canonical order.
  const std::vector<VarSet>& terms() const { return terms_; }
  bool with_three_way() const { return std::find(terms_.begin(), terms_.end(), term::XZY) != terms_.end(); }
  std::size_t columns() const { return terms_.size() + 1; }

  // Column of `t` in the design matrix, if present.
  std::optional<std::size_t> column(VarSet t) const {
    if (t.empty()) return 0;
    auto it = std::find(terms_.begin(), terms_.end(), t);
    if (it == terms_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - terms_.begin()) + 1;
  }

 private:
  VarSet variables_;
  std::vector<VarSet> terms_;
};

// Rows follow the lexicographic cell order over the model's variables (X
// slowest); entry (r, T) is 1 iff every variable of T is at level 1 in row r.
inline Eigen::MatrixXd design_matrix(const ModelSpec& spec) {
  std::vector<Var> vars;
  for (Var v : kVariables)
    if (spec.variables().contains(v)) vars.push_back(v);
  const std::size_t rows = std::size_t{1} << vars.size();

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(spec.columns()));
  for (std::size_t r = 0; r < rows; ++r) {
    std::uint8_t at_one = 0;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const std::size_t shift = vars.size() - 1 - k;
      if ((r >> shift) & 1u) at_one |= static_cast<std::uint8_t>(vars[k]);
    }
    const auto row = static_cast<Eigen::Index>(r);
    d(row, 0) = 1.0;
    for (std::size_t j = 0; j < spec.terms().size(); ++j)
      if ((spec.terms()[j].bits() & at_one) == spec.terms()[j].bits()) d(row, static_cast<Eigen::Index>(j + 1)) = 1.0;
  }
  return d;
}

// Additive (lambda) and multiplicative (mu = exp(lambda)) parameters.
class NoCausalParams {
 public:
  NoCausalParams() { lambda_.fill(0.0); }

  explicit NoCausalParams(const std::array<double, kTerms>& additive) : lambda_(additive) {
    for (double l : lambda_)
      if (!std::isfinite(l)) throw InputError("additive parameters must be finite");
  }

  double lambda(VarSet t) const { return lambda_[term_position(t)]; }
  double mu(VarSet t) const { return std::exp(lambda(t)); }
  double eta() const { return mu(term::eta); }
  bool has_three_way() const { return lambda(term::XZY) != 0.0; }

  const std::array<double, kTerms>& additive() const { return lambda_; }
  std::array<double, kTerms> multiplicative() const {
    std::array<double, kTerms> mu{};
    for (std::size_t i = 0; i < kTerms; ++i) mu[i] = std::exp(lambda_[i]);
    return mu;
  }

 private:
  std::array<double, kTerms> lambda_;
};

inline NoCausalParams multiplicative_from_additive(const std::array<double, kTerms>& lambda) {
  return NoCausalParams(lambda);
}

inline NoCausalParams additive_from_multiplicative(const std::array<double, kTerms>& mu) {
  std::array<double, kTerms> lambda{};
  for (std::size_t i = 0; i < kTerms; ++i) {
    if (!(mu[i] > 0.0) || !std::isfinite(mu[i])) throw InputError("multiplicative parameters must be positive");
    lambda[i] = std::log(mu[i]);
  }
  return NoCausalParams(lambda);
}

// Cell values eta * prod mu over the terms active in each cell.
inline std::array<double, kCells> expected_counts(const NoCausalParams& params) {
  std::array<double, kCells> m{};
  for (std::size_t i = 0; i < kCells; ++i) {
    const Cell c = cell_at(i);
    double log_m = 0.0;
    for (VarSet t : kTermOrder) {
      bool active = true;
      for (Var v : kVariables)
        if (t.contains(v) && c.level(v) != 1) active = false;
      if (active) log_m += params.lambda(t);
    }
    m[i] = std::exp(log_m);
  }
  return m;
}

struct FitControl {
  double tol = 1e-10;      // relative deviance change
  int max_iterations = 100;
  double bound = 30.0;     // |lambda| beyond this signals a non-existent MLE
};

struct FitResult {
  ModelSpec spec = ModelSpec::two_way();
  NoCausalParams params;
  std::array<double, kCells> fitted_counts{};
  // Over the model's design columns (intercept first).
  Eigen::MatrixXd covariance;
  double deviance = 0.0;
  int iterations = 0;
  bool converged = false;

  std::optional<double> covariance_of(VarSet a, VarSet b) const {
    const auto i = spec.column(a);
    const auto j = spec.column(b);
    if (!i || !j || covariance.size() == 0) return std::nullopt;
    return covariance(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j));
  }
};

inline double poisson_deviance(const std::array<double, kCells>& observed, const std::array<double, kCells>& fitted) {
  double dev = 0.0;
  for (std::size_t i = 0; i < kCells; ++i) {
    const double n = observed[i];
    const double m = fitted[i];
    dev += (n > 0.0 ? n * std::log(n / m) : 0.0) - (n - m);
  }
  return std::max(0.0, 2.0 * dev);
}

// Fisher information D' diag(m) D inverted; the asymptotic covariance of the
// additive parameter estimates.
inline Eigen::MatrixXd information_inverse(const Eigen::MatrixXd& design, const Eigen::VectorXd& fitted) {
  const Eigen::MatrixXd info = design.transpose() * fitted.asDiagonal() * design;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(info);
  if (qr.rank() < info.cols()) throw FitError("singular information matrix");
  Eigen::MatrixXd cov = qr.inverse();
  return 0.5 * (cov + cov.transpose());
}

// Poisson GLM with log link, fitted by iteratively reweighted least squares.
inline FitResult fit_poisson(const ContingencyTable& table, const ModelSpec& spec, const FitControl& control = {}) {
  if (spec.variables() != term::XZY) throw InputError("table fits require a model over X, Z and Y");

  const Eigen::MatrixXd d = design_matrix(spec);
  const Eigen::Index p = d.cols();
  Eigen::VectorXd n(static_cast<Eigen::Index>(kCells));
  for (std::size_t i = 0; i < kCells; ++i) n(static_cast<Eigen::Index>(i)) = table[i];

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta(0) = std::log(table.total() / static_cast<double>(kCells));
  Eigen::VectorXd mu = (d * beta).array().exp();

  auto deviance_of = [&](const Eigen::VectorXd& m) {
    std::array<double, kCells> obs{}, fit{};
    for (std::size_t i = 0; i < kCells; ++i) {
      obs[i] = n(static_cast<Eigen::Index>(i));
      fit[i] = m(static_cast<Eigen::Index>(i));
    }
    return poisson_deviance(obs, fit);
  };

  double dev = deviance_of(mu);
  // A small step is required on top of the deviance criterion: near a
  // boundary (zero-cell) solution the deviance stalls while lambda drifts.
  const double step_tol = std::sqrt(control.tol);
  bool converged = false;
  int iter = 0;
  while (iter < control.max_iterations) {
    ++iter;
    const Eigen::VectorXd eta_lin = d * beta;
    const Eigen::VectorXd w_sqrt = mu.array().sqrt();
    const Eigen::VectorXd z = eta_lin.array() + (n - mu).array() / mu.array();

    const Eigen::MatrixXd wd = w_sqrt.asDiagonal() * d;
    const Eigen::VectorXd wz = w_sqrt.cwiseProduct(z);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wd);
    if (qr.rank() < p) throw FitError("singular information matrix at iteration " + std::to_string(iter));
    const Eigen::VectorXd next = qr.solve(wz);
    if (!next.allFinite()) throw FitError("non-finite IRLS update at iteration " + std::to_string(iter));

    for (Eigen::Index j = 1; j < p; ++j) {
      if (std::abs(next(j)) > control.bound)
        throw FitError("parameter " + spec.terms()[static_cast<std::size_t>(j - 1)].name() +
                       " diverges (|lambda| > " + detail::format_number(control.bound) +
                       "); the MLE does not exist, likely due to zero cells");
    }

    const double step = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    mu = (d * beta).array().exp();
    const double dev_new = deviance_of(mu);
    const double rel = std::abs(dev_new - dev) / (std::abs(dev_new) + 0.1);
    dev = dev_new;
    if (rel < control.tol && step < step_tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw FitError("IRLS did not converge in " + std::to_string(control.max_iterations) + " iterations");

  FitResult result{spec, NoCausalParams{}, {}, information_inverse(d, mu), dev, iter, true};
  std::array<double, kTerms> lambda{};
  lambda[0] = beta(0);
  for (std::size_t j = 0; j < spec.terms().size(); ++j)
    lambda[term_position(spec.terms()[j])] = beta(static_cast<Eigen::Index>(j + 1));
  result.params = NoCausalParams(lambda);
  for (std::size_t i = 0; i < kCells; ++i) result.fitted_counts[i] = mu(static_cast<Eigen::Index>(i));
  return result;
}

// Saturated-model MLE by inverting the eight loglinear cell products: the
// main effects are odds against cell (0,0,0), the two-way terms are
// conditional odds ratios and the three-way term is the eight-cell
// cross-ratio.
inline NoCausalParams saturated_closed_form(const ContingencyTable& table) {
  for (std::size_t i = 0; i < kCells; ++i)
    if (!(table[i] > 0.0)) throw InputError("saturated closed form needs all cells positive; cell " +
                                            describe_cell(cell_at(i)) + " is zero");
  auto l = [&](int x, int z, int y) { return std::log(table.count(x, z, y)); };
  std::array<double, kTerms> lambda{};
  lambda[term_position(term::eta)] = l(0, 0, 0);
  lambda[term_position(term::X)] = l(1, 0, 0) - l(0, 0, 0);
  lambda[term_position(term::Z)] = l(0, 1, 0) - l(0, 0, 0);
  lambda[term_position(term::Y)] = l(0, 0, 1) - l(0, 0, 0);
  lambda[term_position(term::XZ)] = l(1, 1, 0) + l(0, 0, 0) - l(1, 0, 0) - l(0, 1, 0);
  lambda[term_position(term::XY)] = l(1, 0, 1) + l(0, 0, 0) - l(1, 0, 0) - l(0, 0, 1);
  lambda[term_position(term::ZY)] = l(0, 1, 1) + l(0, 0, 0) - l(0, 1, 0) - l(0, 0, 1);
  lambda[term_position(term::XZY)] = l(1, 1, 1) + l(1, 0, 0) + l(0, 1, 0) + l(0, 0, 1) - l(1, 1, 0) - l(1, 0, 1) -
                                     l(0, 1, 1) - l(0, 0, 0);
  return NoCausalParams(lambda);
}

}  // namespace cloglin
