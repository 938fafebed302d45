#include "hjsr/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "hjsr/rng.hpp"

namespace hjsr {

namespace {

double poly_eval(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k];
  return v;
}

}  // namespace

KernelSpec KernelSpec::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("constant kernel needs c >= 0");
  KernelSpec k;
  k.kind = Kind::constant;
  k.value = c;
  return k;
}

KernelSpec KernelSpec::exp_abs(double s) {
  if (!std::isfinite(s)) throw DomainError("exp_abs kernel needs a finite scale");
  KernelSpec k;
  k.kind = Kind::exp_abs;
  k.scale = s;
  return k;
}

KernelSpec KernelSpec::gaussian(double s) {
  if (!std::isfinite(s)) throw DomainError("gaussian kernel needs a finite scale");
  KernelSpec k;
  k.kind = Kind::gaussian;
  k.scale = s;
  return k;
}

KernelSpec KernelSpec::separable(std::vector<double> f, std::vector<double> g) {
  if (f.empty() || g.empty()) throw DomainError("separable kernel needs nonempty coefficients");
  for (double c : f)
    if (!std::isfinite(c)) throw DomainError("separable kernel coefficient not finite");
  for (double c : g)
    if (!std::isfinite(c)) throw DomainError("separable kernel coefficient not finite");
  KernelSpec k;
  k.kind = Kind::separable;
  k.f_coeffs = std::move(f);
  k.g_coeffs = std::move(g);
  return k;
}

KernelSpec KernelSpec::piecewise_random(std::uint64_t seed, int blocks) {
  if (blocks < 1) throw DomainError("piecewise kernel needs blocks >= 1");
  KernelSpec k;
  k.kind = Kind::piecewise_constant;
  k.blocks = blocks;
  k.seed = seed;
  Rng rng(seed);
  k.cell_values.resize(static_cast<size_t>(blocks) * blocks);
  for (auto& v : k.cell_values) v = rng.uniform01();
  return k;
}

KernelSpec KernelSpec::piecewise_table(int blocks, std::vector<double> values) {
  if (blocks < 1) throw DomainError("piecewise kernel needs blocks >= 1");
  if (values.size() != static_cast<size_t>(blocks) * blocks)
    throw DomainError("piecewise kernel table must have blocks*blocks values");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0)
      throw DomainError("piecewise kernel values must be non-negative and finite");
  KernelSpec k;
  k.kind = Kind::piecewise_constant;
  k.blocks = blocks;
  k.cell_values = std::move(values);
  return k;
}

double KernelSpec::sample(double x, double y) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::exp_abs:
      return std::exp(-scale * std::abs(x - y));
    case Kind::gaussian:
      return std::exp(-scale * (x - y) * (x - y));
    case Kind::separable:
      return poly_eval(f_coeffs, x) * poly_eval(g_coeffs, y);
    case Kind::piecewise_constant: {
      const int i = std::min(blocks - 1, static_cast<int>(x * blocks));
      const int j = std::min(blocks - 1, static_cast<int>(y * blocks));
      return cell_values[static_cast<size_t>(i) * blocks + j];
    }
  }
  return 0.0;
}

std::string KernelSpec::name() const {
  switch (kind) {
    case Kind::constant:
      return "constant(" + std::to_string(value) + ")";
    case Kind::exp_abs:
      return "exp_abs(" + std::to_string(scale) + ")";
    case Kind::gaussian:
      return "gaussian(" + std::to_string(scale) + ")";
    case Kind::separable:
      return "separable(deg " + std::to_string(f_coeffs.size() - 1) + "," +
             std::to_string(g_coeffs.size() - 1) + ")";
    case Kind::piecewise_constant:
      return "piecewise_constant(" + std::to_string(blocks) + "x" + std::to_string(blocks) + ")";
  }
  return "?";
}

KernelModel discretize(const KernelSpec& spec, int n) {
  if (n < 2) throw DomainError("discretize: grid size must be >= 2");
  KernelModel km;
  km.n = n;
  km.samples.resize(static_cast<size_t>(n) * n);
  km.weights.assign(n, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    for (int j = 0; j < n; ++j) {
      const double y = (j + 0.5) / n;
      const double v = spec.sample(x, y);
      if (!std::isfinite(v) || v < 0.0)
        throw DomainError("kernel sample at (" + std::to_string(x) + "," + std::to_string(y) +
                          ") is negative or not finite");
      km.samples[static_cast<size_t>(i) * n + j] = v;
    }
  }
  return km;
}

NonNegMatrix to_matrix(const KernelModel& km) {
  std::vector<double> m(km.samples.size());
  for (int i = 0; i < km.n; ++i)
    for (int j = 0; j < km.n; ++j)
      m[static_cast<size_t>(i) * km.n + j] =
          km.samples[static_cast<size_t>(i) * km.n + j] * km.weights[j];
  return NonNegMatrix(NonNegMatrix::unchecked_t{}, km.n, std::move(m));
}

KernelModel kernel_hadamard_mean(const std::vector<KernelModel>& models, const WeightVector& w) {
  if (models.empty()) throw DimensionError("kernel_hadamard_mean: empty model list");
  if (static_cast<int>(models.size()) != w.size())
    throw DimensionError("kernel_hadamard_mean: weight count does not match model count");
  if (w.mode() != WeightVector::Mode::strict_sum_one)
    throw DomainError("kernel_hadamard_mean: kernel models require strict weights");
  const int n = models[0].n;
  for (const auto& m : models)
    if (m.n != n) throw DimensionError("kernel_hadamard_mean: grid mismatch");
  KernelModel out;
  out.n = n;
  out.weights = models[0].weights;
  out.samples.assign(static_cast<size_t>(n) * n, 1.0);
  for (size_t f = 0; f < models.size(); ++f) {
    const double alpha = w.weights()[f];
    for (size_t k = 0; k < out.samples.size(); ++k) {
      if (out.samples[k] == 0.0) continue;
      const double v = models[f].samples[k];
      out.samples[k] = (v == 0.0) ? 0.0 : out.samples[k] * std::pow(v, alpha);
    }
  }
  return out;
}

KernelModel kernel_compose(const KernelModel& a, const KernelModel& b) {
  if (a.n != b.n) throw DimensionError("kernel_compose: grid mismatch");
  const int n = a.n;
  KernelModel out;
  out.n = n;
  out.weights = a.weights;
  out.samples.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double aik = a.samples[static_cast<size_t>(i) * n + k] * a.weights[k];
      if (aik == 0.0) continue;
      const double* brow = b.samples.data() + static_cast<size_t>(k) * n;
      double* orow = out.samples.data() + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

}  // namespace hjsr
