#ifndef HJSR_MATRIX_SET_HPP_
#define HJSR_MATRIX_SET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hjsr/matrix.hpp"

namespace hjsr {

/// Finite, nonempty, dimension-homogeneous collection of matrices.
struct MatrixSet {
  int dim = 0;
  std::vector<NonNegMatrix> members;
  std::string label;

  MatrixSet() = default;
  explicit MatrixSet(std::vector<NonNegMatrix> ms, std::string lbl = "");
  int size() const { return static_cast<int>(members.size()); }
};

enum class PruningMode { off, gripenberg };

struct EnumerationBudget {
  int max_depth = 6;
  long long max_products = 2'000'000;
  PruningMode pruning = PruningMode::off;
  double gripenberg_delta = 0.0;  // <= 0: auto, 1e-3 * seed-pass upper
  bool dedup = false;             // exact float-equality dedup (single worker only)
  long bracket_max_iter = 4000;   // per-product power-iteration budget
  double bracket_tol_rel = 1e-10;
};

MatrixSet set_power(const MatrixSet& s, int m, long long max_products = 2'000'000);
MatrixSet set_product(const MatrixSet& p, const MatrixSet& s, long long max_products = 2'000'000);
MatrixSet hadamard_mean_of_sets(const std::vector<MatrixSet>& sets, const WeightVector& w,
                                long long max_products = 2'000'000);

/// max over A in S^m of bracket(A).lower^(1/m): certified lower bound for the
/// generalized (hence also the joint) spectral radius of S.
double gsr_lower(const MatrixSet& s, int m, long long max_products = 2'000'000);

/// min over q in {row-sum, col-sum} of (max over A in S^m of ||A||_q)^(1/m):
/// certified upper bound for the joint (hence also generalized) radius.
double jsr_upper(const MatrixSet& s, int m, long long max_products = 2'000'000);

struct SetRadiusResult {
  RadiusBracket bracket;
  long long products_evaluated = 0;
  bool budget_capped = false;  // effective depth was reduced to fit max_products
  int effective_depth = 0;
  std::vector<int> lower_word;  // index sequence achieving the lower bound
  double pruning_delta = 0.0;   // delta actually used (gripenberg mode)
  double pruning_threshold = 0.0;
};

/// Certified bracket for the common value rho(S) = rho_hat(S); enumeration is
/// partitioned by first factor across `workers` with a deterministic
/// max-reduction (ties: lexicographically smallest index word).
SetRadiusResult radius_bracket_detailed(const MatrixSet& s, const EnumerationBudget& budget,
                                        int workers = 1);
RadiusBracket radius_bracket(const MatrixSet& s, const EnumerationBudget& budget, int workers = 1);

}  // namespace hjsr

#endif  // HJSR_MATRIX_SET_HPP_
