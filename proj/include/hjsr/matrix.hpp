#ifndef HJSR_MATRIX_HPP_
#define HJSR_MATRIX_HPP_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hjsr/errors.hpp"

namespace hjsr {

/// Dense square matrix with finite non-negative entries, row-major.
/// Immutable after construction; all operations below are pure functions.
class NonNegMatrix {
 public:
  NonNegMatrix() = default;
  explicit NonNegMatrix(int dim);  // zero matrix
  NonNegMatrix(int dim, std::vector<double> entries);
  NonNegMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static NonNegMatrix identity(int dim);
  static NonNegMatrix ones(int dim);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }
  const std::vector<double>& entries() const { return a_; }

  bool operator==(const NonNegMatrix& o) const { return dim_ == o.dim_ && a_ == o.a_; }

  // internal: construct from already-validated storage
  struct unchecked_t {};
  NonNegMatrix(unchecked_t, int dim, std::vector<double> entries)
      : dim_(dim), a_(std::move(entries)) {}

 private:
  int dim_ = 0;
  std::vector<double> a_;
};

/// Positive weights for Hadamard geometric means. Strict mode requires the
/// weights to sum to one; relaxed mode only requires the sum to be >= 1
/// (valid for matrices, not for kernel models).
class WeightVector {
 public:
  enum class Mode { strict_sum_one, relaxed_sum_ge_one };

  explicit WeightVector(std::vector<double> weights, Mode mode = Mode::strict_sum_one);

  static WeightVector uniform(int m);  // m copies of 1/m, strict

  const std::vector<double>& weights() const { return w_; }
  Mode mode() const { return mode_; }
  int size() const { return static_cast<int>(w_.size()); }

 private:
  std::vector<double> w_;
  Mode mode_;
};

/// Certified enclosure [lower, upper] of a spectral radius, with provenance.
/// `converged` is false when the requested tolerance was not reached within
/// budget; the endpoints are still valid bounds in that case.
struct RadiusBracket {
  double lower = 0.0;
  double upper = 0.0;
  int lower_depth = 1;
  int upper_depth = 1;
  std::string method;
  bool converged = true;

  double width() const { return upper - lower; }
  bool contains(double v, double margin = 0.0) const {
    return lower - margin <= v && v <= upper + margin;
  }
};

NonNegMatrix hadamard_product(const NonNegMatrix& a, const NonNegMatrix& b);

// Entrywise alpha-th power with 0^alpha := 0. alpha <= 0 is rejected.
NonNegMatrix hadamard_power(const NonNegMatrix& a, double alpha);

NonNegMatrix hadamard_geometric_mean(std::span<const NonNegMatrix> mats, const WeightVector& w);
NonNegMatrix hadamard_geometric_mean(const std::vector<NonNegMatrix>& mats, const WeightVector& w);

NonNegMatrix mat_product(const NonNegMatrix& a, const NonNegMatrix& b);

double row_sum_norm(const NonNegMatrix& a);  // max row sum (l-inf induced)
double col_sum_norm(const NonNegMatrix& a);  // max column sum (l-1 induced)

// min(max row sum, max column sum); always >= rho(a).
double operator_norm(const NonNegMatrix& a);

/// Certified bracket for rho(A) via Collatz-Wielandt ratios on a shifted
/// power iteration, with diagonal-of-powers lower bounds, Gelfand bounds from
/// repeated squaring, and an all-ones regularization fallback for stubborn
/// reducible matrices. Never returns an uncertified endpoint.
RadiusBracket spectral_radius_bracket(const NonNegMatrix& a, double tol_rel = 1e-10,
                                      long max_iter = 100000);

/// Closed-form spectral radius for dim <= 3 (characteristic polynomial).
/// Serves as the independent oracle for spectral_radius_bracket.
double spectral_radius_exact_small(const NonNegMatrix& a);

}  // namespace hjsr

#endif  // HJSR_MATRIX_HPP_
