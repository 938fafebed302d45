#ifndef HJSR_KERNEL_HPP_
#define HJSR_KERNEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hjsr/matrix.hpp"

namespace hjsr {

/// Closed catalog of kernel shapes on [0,1]^2. Values must be finite and
/// non-negative; separable polynomials are validated at the sample points.
struct KernelSpec {
  enum class Kind { constant, exp_abs, gaussian, separable, piecewise_constant };

  Kind kind = Kind::constant;
  double value = 1.0;  // constant(c)
  double scale = 1.0;  // exp_abs(s): e^{-s|x-y|}; gaussian(s): e^{-s(x-y)^2}
  std::vector<double> f_coeffs{1.0};  // separable: f(x) g(y), ascending powers
  std::vector<double> g_coeffs{1.0};
  int blocks = 0;  // piecewise_constant: blocks x blocks cells
  std::uint64_t seed = 0;
  std::vector<double> cell_values;  // row-major blocks x blocks

  static KernelSpec constant(double c);
  static KernelSpec exp_abs(double s);
  static KernelSpec gaussian(double s);
  static KernelSpec separable(std::vector<double> f, std::vector<double> g);
  static KernelSpec piecewise_random(std::uint64_t seed, int blocks);
  static KernelSpec piecewise_table(int blocks, std::vector<double> values);

  double sample(double x, double y) const;
  std::string name() const;
};

/// Midpoint-rule discretization of a positive kernel operator on L^2([0,1]):
/// samples[i][j] = a(x_i, x_j) at x_i = (i + 1/2)/n, weights all 1/n.
struct KernelModel {
  int n = 0;
  std::vector<double> samples;  // n x n row-major
  std::vector<double> weights;  // length n, each 1/n

  double sample(int i, int j) const { return samples[static_cast<size_t>(i) * n + j]; }
};

KernelModel discretize(const KernelSpec& spec, int n);

/// M[i][j] = samples[i][j] * weights[j]; operator composition corresponds to
/// mat_product of these matrices.
NonNegMatrix to_matrix(const KernelModel& km);

/// Hadamard weighted geometric mean on the kernel samples (the faithful
/// discretization); weights must be strict.
KernelModel kernel_hadamard_mean(const std::vector<KernelModel>& models, const WeightVector& w);

/// Discretized operator composition: the kernel of AB is
/// (ab)(x,z) = integral a(x,y) b(y,z) dy, so samples_AB = samples_A * diag(w) * samples_B.
KernelModel kernel_compose(const KernelModel& a, const KernelModel& b);

}  // namespace hjsr

#endif  // HJSR_KERNEL_HPP_
