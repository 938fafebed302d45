#include "hjsr/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjsr {

namespace {

void check_entries(int dim, const std::vector<double>& a) {
  if (dim < 1) throw DimensionError("matrix dim must be >= 1");
  if (a.size() != static_cast<size_t>(dim) * dim)
    throw DimensionError("entry count does not match dim*dim");
  for (size_t k = 0; k < a.size(); ++k) {
    if (!std::isfinite(a[k]) || a[k] < 0.0) {
      throw DomainError("matrix entry at flat index " + std::to_string(k) +
                        " is negative or not finite");
    }
  }
}

void check_same_dim(const NonNegMatrix& a, const NonNegMatrix& b, const char* op) {
  if (a.dim() != b.dim())
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
}

}  // namespace

NonNegMatrix::NonNegMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim, 0.0) {
  if (dim < 1) throw DimensionError("matrix dim must be >= 1");
}

NonNegMatrix::NonNegMatrix(int dim, std::vector<double> entries)
    : dim_(dim), a_(std::move(entries)) {
  check_entries(dim_, a_);
}

NonNegMatrix::NonNegMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  dim_ = static_cast<int>(rows.size());
  a_.reserve(static_cast<size_t>(dim_) * dim_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != dim_)
      throw DimensionError("row length does not match row count");
    a_.insert(a_.end(), r.begin(), r.end());
  }
  check_entries(dim_, a_);
}

NonNegMatrix NonNegMatrix::identity(int dim) {
  NonNegMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.a_[static_cast<size_t>(i) * dim + i] = 1.0;
  return m;
}

NonNegMatrix NonNegMatrix::ones(int dim) {
  if (dim < 1) throw DimensionError("matrix dim must be >= 1");
  return NonNegMatrix(unchecked_t{}, dim, std::vector<double>(static_cast<size_t>(dim) * dim, 1.0));
}

WeightVector::WeightVector(std::vector<double> weights, Mode mode)
    : w_(std::move(weights)), mode_(mode) {
  if (w_.empty()) throw DomainError("weight vector must be nonempty");
  double sum = 0.0;
  for (double a : w_) {
    if (!std::isfinite(a) || a <= 0.0) throw DomainError("weights must be positive and finite");
    sum += a;
  }
  if (mode_ == Mode::strict_sum_one) {
    if (std::abs(sum - 1.0) > 1e-12)
      throw DomainError("strict weights must sum to 1 (got " + std::to_string(sum) + ")");
  } else {
    if (sum < 1.0 - 1e-12)
      throw DomainError("relaxed weights must sum to >= 1 (got " + std::to_string(sum) + ")");
  }
}

WeightVector WeightVector::uniform(int m) {
  if (m < 1) throw DomainError("weight count must be >= 1");
  return WeightVector(std::vector<double>(m, 1.0 / m), Mode::strict_sum_one);
}

NonNegMatrix hadamard_product(const NonNegMatrix& a, const NonNegMatrix& b) {
  check_same_dim(a, b, "hadamard_product");
  std::vector<double> c(a.entries().size());
  for (size_t k = 0; k < c.size(); ++k) c[k] = a.entries()[k] * b.entries()[k];
  return NonNegMatrix(NonNegMatrix::unchecked_t{}, a.dim(), std::move(c));
}

NonNegMatrix hadamard_power(const NonNegMatrix& a, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError("hadamard_power: alpha must be positive and finite");
  std::vector<double> c(a.entries().size());
  for (size_t k = 0; k < c.size(); ++k) {
    double v = a.entries()[k];
    c[k] = (v == 0.0) ? 0.0 : std::pow(v, alpha);
  }
  return NonNegMatrix(NonNegMatrix::unchecked_t{}, a.dim(), std::move(c));
}

NonNegMatrix hadamard_geometric_mean(std::span<const NonNegMatrix> mats, const WeightVector& w) {
  if (mats.empty()) throw DimensionError("hadamard_geometric_mean: empty matrix list");
  if (static_cast<int>(mats.size()) != w.size())
    throw DimensionError("hadamard_geometric_mean: weight count does not match matrix count");
  const int n = mats[0].dim();
  for (const auto& m : mats) check_same_dim(mats[0], m, "hadamard_geometric_mean");
  std::vector<double> c(static_cast<size_t>(n) * n, 1.0);
  for (size_t f = 0; f < mats.size(); ++f) {
    const double alpha = w.weights()[f];
    const auto& e = mats[f].entries();
    for (size_t k = 0; k < c.size(); ++k) {
      if (c[k] == 0.0) continue;
      c[k] = (e[k] == 0.0) ? 0.0 : c[k] * std::pow(e[k], alpha);
    }
  }
  return NonNegMatrix(NonNegMatrix::unchecked_t{}, n, std::move(c));
}

NonNegMatrix hadamard_geometric_mean(const std::vector<NonNegMatrix>& mats,
                                     const WeightVector& w) {
  return hadamard_geometric_mean(std::span<const NonNegMatrix>(mats.data(), mats.size()), w);
}

NonNegMatrix mat_product(const NonNegMatrix& a, const NonNegMatrix& b) {
  check_same_dim(a, b, "mat_product");
  const int n = a.dim();
  std::vector<double> c(static_cast<size_t>(n) * n, 0.0);
  const double* pa = a.entries().data();
  const double* pb = b.entries().data();
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double aik = pa[static_cast<size_t>(i) * n + k];
      if (aik == 0.0) continue;
      const double* brow = pb + static_cast<size_t>(k) * n;
      double* crow = c.data() + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return NonNegMatrix(NonNegMatrix::unchecked_t{}, n, std::move(c));
}

double row_sum_norm(const NonNegMatrix& a) {
  const int n = a.dim();
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += a(i, j);
    best = std::max(best, s);
  }
  return best;
}

double col_sum_norm(const NonNegMatrix& a) {
  const int n = a.dim();
  std::vector<double> s(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s[j] += a(i, j);
  return *std::max_element(s.begin(), s.end());
}

double operator_norm(const NonNegMatrix& a) {
  return std::min(row_sum_norm(a), col_sum_norm(a));
}

namespace {

// Flat row-major helpers used by the bracket engine.

double buf_min_norm(const std::vector<double>& m, int n) {
  double rmax = 0.0;
  std::vector<double> cs(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double rs = 0.0;
    const double* row = m.data() + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      rs += row[j];
      cs[j] += row[j];
    }
    rmax = std::max(rmax, rs);
  }
  return std::min(rmax, *std::max_element(cs.begin(), cs.end()));
}

double buf_max_diag(const std::vector<double>& m, int n) {
  double d = 0.0;
  for (int i = 0; i < n; ++i) d = std::max(d, m[static_cast<size_t>(i) * n + i]);
  return d;
}

void buf_mul(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& c,
             int n) {
  std::fill(c.begin(), c.end(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double aik = a[static_cast<size_t>(i) * n + k];
      if (aik == 0.0) continue;
      const double* brow = b.data() + static_cast<size_t>(k) * n;
      double* crow = c.data() + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

// A non-negative matrix has rho = 0 exactly when its nonzero pattern is
// acyclic; transitive closure over the boolean pattern decides that.
bool pattern_has_cycle(const std::vector<double>& m, int n) {
  std::vector<char> reach(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      reach[static_cast<size_t>(i) * n + j] = m[static_cast<size_t>(i) * n + j] > 0.0 ? 1 : 0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      if (!reach[static_cast<size_t>(i) * n + k]) continue;
      const char* krow = reach.data() + static_cast<size_t>(k) * n;
      char* irow = reach.data() + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) irow[j] |= krow[j];
    }
  for (int i = 0; i < n; ++i)
    if (reach[static_cast<size_t>(i) * n + i]) return true;
  return false;
}

struct BoundState {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  void raise_lo(double v) { lo = std::max(lo, v); }
  void drop_hi(double v) { hi = std::min(hi, v); }
  bool done(double tol_rel) const { return hi - lo <= tol_rel * hi; }
};

// Collatz-Wielandt sweep on (S + shift*I + eps*J). Lower candidates for
// rho(S) come from min_i (Sx)_i/x_i over the support of x, valid for any
// nonnegative nonzero x; upper candidates come from max_i (Mx)_i/x_i minus
// the shift, valid while x is strictly positive (monotonicity handles the
// eps*J part). Returns iterations spent.
long cw_sweep(const std::vector<double>& s, int n, double shift, double eps, long iter_budget,
              double tol_rel, bool bail_on_stall, BoundState& bs) {
  std::vector<double> x(n, 1.0), sx(n);
  bool x_positive = true;
  double prev_gap = std::numeric_limits<double>::infinity();
  long it = 0;
  for (; it < iter_budget; ++it) {
    double sum_x = 0.0;
    for (int i = 0; i < n; ++i) sum_x += x[i];
    const double eps_mass = eps * sum_x;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      const double* row = s.data() + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) acc += row[j] * x[j];
      sx[i] = acc;
    }
    double lo_ratio = std::numeric_limits<double>::infinity();
    double hi_ratio = 0.0;
    for (int i = 0; i < n; ++i) {
      if (x[i] > 0.0) lo_ratio = std::min(lo_ratio, sx[i] / x[i]);
      if (x_positive) hi_ratio = std::max(hi_ratio, (sx[i] + eps_mass) / x[i]);
    }
    if (std::isfinite(lo_ratio)) bs.raise_lo(lo_ratio);
    if (x_positive) bs.drop_hi(std::max(0.0, hi_ratio));
    if (bs.done(tol_rel)) return it + 1;
    if ((it & 31) == 31) {
      const double gap = bs.hi - bs.lo;
      if (bail_on_stall && gap > 0.97 * prev_gap && it >= 63) return it + 1;
      prev_gap = gap;
    }
    double ymax = 0.0;
    for (int i = 0; i < n; ++i) {
      sx[i] += eps_mass + shift * x[i];
      ymax = std::max(ymax, sx[i]);
    }
    if (ymax == 0.0) {
      bs.drop_hi(bs.lo);
      return it + 1;
    }
    x_positive = true;
    for (int i = 0; i < n; ++i) {
      double v = sx[i] / ymax;
      if (v < 1e-280) v = 0.0;  // support truncation; any test vector is valid
      x[i] = v;
      x_positive = x_positive && (v > 0.0);
    }
  }
  return it;
}

// Repeated squaring of S^p with log-scale tracking. Gelfand uppers
// ||S^e||^(1/e) and diagonal lower bounds ((S^e)_ii)^(1/e) are both certified
// for every exponent e = p*2^j.
void squaring_sweep(const std::vector<double>& s, int n, int p, double tol_rel, BoundState& bs) {
  std::vector<double> b(s), tmp(s.size());
  for (int q = 1; q < p; ++q) {
    buf_mul(b, s, tmp, n);
    b.swap(tmp);
  }
  double exponent = static_cast<double>(p);
  double logscale = 0.0;
  for (int j = 0; j <= 44; ++j) {
    if (j > 0) {
      buf_mul(b, b, tmp, n);
      b.swap(tmp);
      exponent *= 2.0;
      logscale *= 2.0;
    }
    const double nb = buf_min_norm(b, n);
    if (nb == 0.0) {
      // every entry underflowed to zero: each true entry is below n times the
      // smallest product that rounds to zero, so row sums sit below 1e-315
      // for n <= 128 and this stays a certified upper
      bs.drop_hi(std::exp((std::log(1e-315) + logscale) / exponent));
      return;
    }
    logscale += std::log(nb);
    for (auto& v : b) v /= nb;
    bs.drop_hi(std::exp(logscale / exponent));
    const double d = buf_max_diag(b, n);
    if (d > 0.0) bs.raise_lo(std::exp((std::log(d) + logscale) / exponent));
    if (bs.done(tol_rel)) return;
  }
}

}  // namespace

RadiusBracket spectral_radius_bracket(const NonNegMatrix& a, double tol_rel, long max_iter) {
  if (!(tol_rel > 0.0)) throw DomainError("spectral_radius_bracket: tol_rel must be positive");
  if (max_iter < 1) throw DomainError("spectral_radius_bracket: max_iter must be >= 1");
  const int n = a.dim();
  const double opn = operator_norm(a);
  RadiusBracket out;
  if (opn == 0.0) {
    out.method = "zero";
    return out;
  }
  if (n == 1) {
    out.lower = out.upper = a(0, 0);
    out.method = "scalar";
    return out;
  }
  if (!pattern_has_cycle(a.entries(), n)) {
    out.method = "acyclic";
    return out;
  }

  // Run on S = A/opn so every threshold is scale-free; map back through opn.
  std::vector<double> s(a.entries());
  for (auto& v : s) v /= opn;

  BoundState bs;
  bs.hi = 1.0;  // min-norm of S is 1 by construction
  bs.raise_lo(buf_max_diag(s, n));
  std::string method = "cw";
  long iters_left = max_iter;

  if (!bs.done(tol_rel)) {
    // small powers: diagonal lower bounds catch periodic dominant classes
    const int kmax = std::min(n, 24);
    std::vector<double> pk(s), tmp(s.size());
    int best_p = 1;
    double best_p_val = bs.lo;
    for (int k = 2; k <= kmax && !bs.done(tol_rel); ++k) {
      buf_mul(pk, s, tmp, n);
      pk.swap(tmp);
      bs.drop_hi(std::pow(buf_min_norm(pk, n), 1.0 / k));
      const double d = buf_max_diag(pk, n);
      if (d > 0.0) {
        const double cand = std::pow(d, 1.0 / k);
        if (cand > best_p_val) {
          best_p_val = cand;
          best_p = k;
        }
        bs.raise_lo(cand);
      }
    }

    if (!bs.done(tol_rel)) {
      iters_left -= cw_sweep(s, n, /*shift=*/0.5, /*eps=*/0.0, iters_left, tol_rel,
                             /*bail_on_stall=*/true, bs);
    }

    if (!bs.done(tol_rel)) {
      method += "+pow";
      squaring_sweep(s, n, 1, tol_rel, bs);
      if (!bs.done(tol_rel) && best_p > 1) squaring_sweep(s, n, best_p, tol_rel, bs);
    }

    if (!bs.done(tol_rel)) {
      method += "+eps";
      for (double eps : {1e-8, 1e-10, 1e-12}) {
        if (iters_left <= 0 || bs.done(tol_rel)) break;
        const long budget = std::max<long>(64, iters_left / 4);
        iters_left -= cw_sweep(s, n, /*shift=*/0.0, eps, budget, tol_rel, true, bs);
      }
      if (!bs.done(tol_rel) && iters_left > 0) {
        iters_left -= cw_sweep(s, n, 0.5, 0.0, iters_left, tol_rel, /*bail_on_stall=*/false, bs);
      }
    }
  }

  bs.lo = std::min(bs.lo, bs.hi);
  out.lower = bs.lo * opn;
  out.upper = bs.hi * opn;
  out.converged = bs.done(tol_rel);
  out.method = method;
  return out;
}

double spectral_radius_exact_small(const NonNegMatrix& a) {
  const int n = a.dim();
  if (n > 3) throw DomainError("spectral_radius_exact_small: dim must be <= 3");
  if (n == 1) return a(0, 0);
  const double opn = operator_norm(a);
  if (opn == 0.0) return 0.0;
  if (!pattern_has_cycle(a.entries(), n)) return 0.0;  // nilpotent exactly
  const double inv = 1.0 / opn;
  if (n == 2) {
    const double d00 = a(0, 0) * inv, d11 = a(1, 1) * inv;
    const double off = (a(0, 1) * inv) * (a(1, 0) * inv);
    // eigenvalues are real: discriminant (a-d)^2 + 4bc >= 0 for bc >= 0
    const double disc = (d00 - d11) * (d00 - d11) + 4.0 * off;
    return opn * 0.5 * (d00 + d11 + std::sqrt(std::max(0.0, disc)));
  }
  // n == 3: rho is the largest real root of the characteristic polynomial
  // p(x) = x^3 - c2 x^2 + c1 x - c0 of the normalized matrix.
  double m[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = a(i, j) * inv;
  const double c2 = m[0][0] + m[1][1] + m[2][2];
  const double c1 = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) +
                    (m[0][0] * m[2][2] - m[0][2] * m[2][0]) +
                    (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
  const double c0 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                    m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                    m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  auto p = [&](double x) { return ((x - c2) * x + c1) * x - c0; };
  auto dp = [&](double x) { return (3.0 * x - 2.0 * c2) * x + c1; };
  // Newton from above the largest root, where p is positive and convex.
  double x = 1.0 + 1e-9;
  for (int it = 0; it < 200; ++it) {
    const double px = p(x);
    if (px <= 0.0) break;
    const double dpx = dp(x);
    double nx = (dpx > 0.0) ? x - px / dpx : std::nextafter(x, 0.0);
    if (!(nx < x)) nx = std::nextafter(x, 0.0);
    if (p(nx) < 0.0) {
      double lo = nx, hi = x;
      for (int b = 0; b < 200 && hi - lo > 1e-17 * std::max(1.0, hi); ++b) {
        const double mid = 0.5 * (lo + hi);
        if (p(mid) < 0.0)
          lo = mid;
        else
          hi = mid;
      }
      return opn * 0.5 * (lo + hi);
    }
    if (x - nx <= 1e-17 * std::max(1.0, x)) {
      x = nx;
      break;
    }
    x = nx;
  }
  return opn * std::max(0.0, x);
}

}  // namespace hjsr
