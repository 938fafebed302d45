#include "hjsr/chains.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <thread>

#include "hjsr/rng.hpp"

namespace hjsr {

SetExpr SetExpr::in(int i) {
  SetExpr e;
  e.kind = Kind::input;
  e.input_index = i;
  return e;
}

SetExpr SetExpr::prod(std::vector<SetExpr> factors) {
  SetExpr e;
  e.kind = Kind::product;
  e.children = std::move(factors);
  return e;
}

SetExpr SetExpr::pow(SetExpr base, int k) {
  SetExpr e;
  e.kind = Kind::power;
  e.children.push_back(std::move(base));
  e.power_k = k;
  return e;
}

SetExpr SetExpr::hmean(std::vector<SetExpr> factors, std::vector<double> w,
                       WeightVector::Mode mode) {
  SetExpr e;
  e.kind = Kind::hmean;
  e.children = std::move(factors);
  e.weights = std::move(w);
  e.wmode = mode;
  return e;
}

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string SetExpr::describe(const std::vector<std::string>& names) const {
  switch (kind) {
    case Kind::input:
      return input_index < static_cast<int>(names.size()) ? names[input_index]
                                                          : "S" + std::to_string(input_index);
    case Kind::product: {
      std::string s = "(";
      for (size_t i = 0; i < children.size(); ++i) {
        if (i) s += " ";
        s += children[i].describe(names);
      }
      return s + ")";
    }
    case Kind::power:
      return children[0].describe(names) + "^" + std::to_string(power_k);
    case Kind::hmean: {
      bool plain = wmode == WeightVector::Mode::relaxed_sum_ge_one;
      for (double w : weights) plain = plain && w == 1.0;
      std::string s = "(";
      for (size_t i = 0; i < children.size(); ++i) {
        if (i) s += " o ";
        s += children[i].describe(names);
        if (!plain) s += "^(" + fmt_short(weights[i]) + ")";
      }
      return s + ")";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// catalog

namespace {

using SE = SetExpr;

SE had(SE a, SE b) {  // plain Hadamard product, weights (1,1), relaxed
  return SE::hmean({std::move(a), std::move(b)}, {1.0, 1.0},
                   WeightVector::Mode::relaxed_sum_ge_one);
}

SE gm(SE a, SE b) {  // square-root geometric mean
  return SE::hmean({std::move(a), std::move(b)}, {0.5, 0.5});
}

SE gm_tuple(std::vector<SE> xs) {
  const size_t m = xs.size();
  return SE::hmean(std::move(xs), std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Term t1(SE e, double x = 1.0) { return Term{TermFactor{std::move(e), x}}; }

std::vector<SE> all_inputs(int m) {
  std::vector<SE> v;
  for (int i = 0; i < m; ++i) v.push_back(SE::in(i));
  return v;
}

std::vector<ChainSpec> make_catalog() {
  std::vector<ChainSpec> cat;
  const SE A = SE::in(0), B = SE::in(1);
  const SE AB = SE::prod({A, B}), BA = SE::prod({B, A});

  {
    ChainSpec c;
    c.id = "C1";
    c.summary = "r(AoB) <= r((AoA)(BoB))^1/2 <= r(AB)";
    c.build = [=](int, const ChainParams&) {
      Branch b{t1(had(A, B)), t1(SE::prod({had(A, A), had(B, B)}), 0.5), t1(AB)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C2";
    c.summary = "r(AoB) <= r(AB o BA)^1/2 <= r(AB)";
    c.build = [=](int, const ChainParams&) {
      Branch b{t1(had(A, B)), t1(had(AB, BA), 0.5), t1(AB)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C3";
    c.summary = "r(A1 o ... o Am) <= r(A1...Am)";
    c.operand_count = -1;
    c.build = [](int m, const ChainParams&) {
      auto ins = all_inputs(m);
      SE lhs = SE::hmean(ins, std::vector<double>(m, 1.0),
                         WeightVector::Mode::relaxed_sum_ge_one);
      Branch b{t1(lhs), t1(SE::prod(ins))};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C4";
    c.summary = "r(AoB) <= r((AoA)(BoB))^1/2 <= r(AB o AB)^1/2 <= r(AB)";
    c.build = [=](int, const ChainParams&) {
      Branch b{t1(had(A, B)), t1(SE::prod({had(A, A), had(B, B)}), 0.5), t1(had(AB, AB), 0.5),
               t1(AB)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C5";
    c.summary = "alpha-interpolated refinement of C1";
    c.uses_alpha = true;
    c.build = [=](int, const ChainParams& p) {
      Term mid{TermFactor{had(AB, AB), p.alpha / 2.0}, TermFactor{had(BA, BA), (1.0 - p.alpha) / 2.0}};
      Branch b{t1(had(A, B)), t1(SE::prod({had(A, A), had(B, B)}), 0.5), mid, t1(AB)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C6";
    c.summary = "r(AoB) <= r(AB o BA)^1/2 <= r(AB o AB)^1/4 r(BA o BA)^1/4 <= r(AB)";
    c.build = [=](int, const ChainParams&) {
      Term mid{TermFactor{had(AB, AB), 0.25}, TermFactor{had(BA, BA), 0.25}};
      Branch b{t1(had(A, B)), t1(had(AB, BA), 0.5), mid, t1(AB)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C7";
    c.summary = "r(A^(1/2) o B^(1/2)) <= r(AB)^1/2";
    c.kernel_applicable = true;
    c.build = [=](int, const ChainParams&) {
      Branch b{t1(gm(A, B)), t1(AB, 0.5)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C8";
    c.summary = "r(A1^(1/m) o ... o Am^(1/m)) <= r(A1...Am)^(1/m)";
    c.operand_count = -1;
    c.kernel_applicable = true;
    c.build = [](int m, const ChainParams&) {
      auto ins = all_inputs(m);
      Branch b{t1(gm_tuple(ins)), t1(SE::prod(ins), 1.0 / m)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C9";
    c.summary = "cyclic-product refinement of C8";
    c.operand_count = -1;
    c.kernel_applicable = true;
    c.build = [](int m, const ChainParams&) {
      auto ins = all_inputs(m);
      std::vector<SE> cyc;
      for (int j = 0; j < m; ++j) {
        std::vector<SE> rot;
        for (int t = 0; t < m; ++t) rot.push_back(SE::in((j + t) % m));
        cyc.push_back(SE::prod(rot));
      }
      Branch b{t1(gm_tuple(ins)), t1(gm_tuple(cyc), 1.0 / m), t1(SE::prod(ins), 1.0 / m)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C10";
    c.summary = "r(A^(1/2) o B^(1/2)) <= r((AB)^(1/2) o (BA)^(1/2))^1/2 <= r(AB)^1/2";
    c.kernel_applicable = true;
    c.build = [=](int, const ChainParams&) {
      Branch b{t1(gm(A, B)), t1(gm(AB, BA), 0.5), t1(AB, 0.5)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C11";
    c.summary = "r(P1^(a1) o ... o Pm^(am)) <= prod r(Pi)^(ai)";
    c.operand_count = -1;
    c.set_operands = true;
    c.uses_weights = true;
    c.build = [](int m, const ChainParams& p) {
      auto ins = all_inputs(m);
      Term rhs;
      for (int i = 0; i < m; ++i) rhs.push_back(TermFactor{SE::in(i), p.weights[i]});
      Branch b{t1(SE::hmean(ins, p.weights)), rhs};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C12";
    c.summary = "r(P1^(1/m) o ... o Pm^(1/m)) <= r(P1...Pm)^(1/m)";
    c.operand_count = -1;
    c.set_operands = true;
    c.build = [](int m, const ChainParams&) {
      auto ins = all_inputs(m);
      Branch b{t1(gm_tuple(ins)), t1(SE::prod(ins), 1.0 / m)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C13";
    c.summary = "two-set case of C12";
    c.set_operands = true;
    c.build = [=](int, const ChainParams&) {
      Branch b{t1(gm(A, B)), t1(AB, 0.5)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C14";
    c.summary = "set refinements with middle terms (PS)^(1/2)o(SP)^(1/2) and (P'P')(S'S')";
    c.set_operands = true;
    c.uses_alpha = true;
    c.build = [=](int, const ChainParams& p) {
      Term mid1{TermFactor{gm(AB, AB), 0.25}, TermFactor{gm(BA, BA), 0.25}};
      Branch b1{t1(gm(A, B)), t1(gm(AB, BA), 0.5), mid1, t1(AB, 0.5)};
      Term mid2{TermFactor{gm(AB, AB), p.alpha / 2.0},
                TermFactor{gm(BA, BA), (1.0 - p.alpha) / 2.0}};
      Branch b2{t1(gm(A, B)), t1(SE::prod({gm(A, A), gm(B, B)}), 0.5), mid2, t1(AB, 0.5)};
      return std::vector<Branch>{b1, b2};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C15";
    c.summary = "r((PS)^(1/2) o (SP)^(1/2)) <= r(P^2 S^2)^1/2";
    c.set_operands = true;
    c.build = [=](int, const ChainParams&) {
      Branch b{t1(gm(AB, BA)), t1(SE::prod({SE::pow(A, 2), SE::pow(B, 2)}), 0.5)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C16";
    c.summary = "k-th power refinement of C11";
    c.operand_count = -1;
    c.set_operands = true;
    c.uses_weights = true;
    c.uses_k = true;
    c.build = [](int m, const ChainParams& p) {
      auto ins = all_inputs(m);
      std::vector<SE> pows;
      for (int i = 0; i < m; ++i) pows.push_back(SE::pow(SE::in(i), p.k));
      Term rhs;
      for (int i = 0; i < m; ++i) rhs.push_back(TermFactor{SE::in(i), p.weights[i]});
      Branch b{t1(SE::hmean(ins, p.weights)), t1(SE::hmean(pows, p.weights), 1.0 / p.k), rhs};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C17";
    c.summary = "two-set case of C16";
    c.set_operands = true;
    c.uses_k = true;
    c.build = [=](int, const ChainParams& p) {
      Term rhs{TermFactor{A, 0.5}, TermFactor{B, 0.5}};
      Branch b{t1(gm(A, B)), t1(gm(SE::pow(A, p.k), SE::pow(B, p.k)), 1.0 / p.k), rhs};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C18";
    c.summary = "single-operator case of C16";
    c.operand_count = -1;
    c.uses_weights = true;
    c.uses_k = true;
    c.build = [](int m, const ChainParams& p) {
      auto ins = all_inputs(m);
      std::vector<SE> pows;
      for (int i = 0; i < m; ++i) pows.push_back(SE::pow(SE::in(i), p.k));
      Term rhs;
      for (int i = 0; i < m; ++i) rhs.push_back(TermFactor{SE::in(i), p.weights[i]});
      Branch b{t1(SE::hmean(ins, p.weights)), t1(SE::hmean(pows, p.weights), 1.0 / p.k), rhs};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  {
    ChainSpec c;
    c.id = "C19";
    c.summary = "k-th power refinement of the C14 middle bound";
    c.set_operands = true;
    c.uses_alpha = true;
    c.uses_k = true;
    c.build = [=](int, const ChainParams& p) {
      const double a = p.alpha;
      Term left{TermFactor{gm(AB, AB), a / 2.0}, TermFactor{gm(BA, BA), (1.0 - a) / 2.0}};
      Term mid{TermFactor{gm(SE::pow(AB, p.k), SE::pow(AB, p.k)), a / (2.0 * p.k)},
               TermFactor{gm(SE::pow(BA, p.k), SE::pow(BA, p.k)), (1.0 - a) / (2.0 * p.k)}};
      Branch b{left, mid, t1(AB, 0.5)};
      return std::vector<Branch>{b};
    };
    cat.push_back(c);
  }
  return cat;
}

}  // namespace

const std::vector<ChainSpec>& chain_catalog() {
  static const std::vector<ChainSpec> cat = make_catalog();
  return cat;
}

const ChainSpec& chain_by_id(const std::string& id) {
  for (const auto& c : chain_catalog())
    if (c.id == id) return c;
  throw DomainError("unknown chain id: " + id);
}

// ---------------------------------------------------------------------------
// evaluation

int ChainInputs::dim() const {
  if (kernel_mode) return kernels.empty() ? 0 : kernels[0].n;
  return sets.empty() ? 0 : sets[0].dim;
}

namespace {

struct TermSetValue {
  MatrixSet set;        // materialized members, or a certified subset if capped
  bool capped = false;
  long long full_size = 0;
  double capped_upper = std::numeric_limits<double>::infinity();
};

struct CachedBracket {
  RadiusBracket bracket;
  long long set_size = 0;
  bool capped = false;
};

struct EvalCtx {
  const ChainInputs* inputs = nullptr;
  const EvalOptions* opts = nullptr;
  std::vector<std::string> names;
  std::map<std::string, TermSetValue> memo;
  std::map<std::string, CachedBracket> bracket_memo;
};

TermSetValue eval_set_expr(const SetExpr& e, EvalCtx& ctx);

TermSetValue eval_hmean(const SetExpr& e, EvalCtx& ctx) {
  std::vector<TermSetValue> kids;
  kids.reserve(e.children.size());
  for (const auto& ch : e.children) {
    kids.push_back(eval_set_expr(ch, ctx));
    if (kids.back().capped)
      throw BudgetError("hadamard mean over an already capped operand");
  }
  WeightVector w(e.weights, e.wmode);
  long long total = 1;
  const long long cap = std::min(ctx.opts->mean_cap, ctx.opts->budget.max_products);
  bool fits = true;
  for (const auto& k : kids) {
    if (total > cap / k.set.size()) {
      fits = false;
      break;
    }
    total *= k.set.size();
  }
  if (fits) {
    std::vector<MatrixSet> sets;
    sets.reserve(kids.size());
    for (auto& k : kids) sets.push_back(std::move(k.set));
    TermSetValue v;
    v.set = hadamard_mean_of_sets(sets, w, cap);
    v.full_size = v.set.size();
    return v;
  }
  if (e.wmode != WeightVector::Mode::strict_sum_one)
    throw BudgetError("relaxed-weight mean too large to materialize");
  // Fallback bounds for an oversized mean set: the arithmetic decomposition
  // ||X1^(a1) o ... o Xm^(am)|| <= sum ai ||Xi|| gives a depth-1 upper from
  // the factor sets alone, and any explicit subset of members certifies a
  // lower bound.
  TermSetValue v;
  v.capped = true;
  v.full_size = 1;
  for (const auto& k : kids) {
    if (v.full_size > (1LL << 62) / k.set.size()) {
      v.full_size = -1;  // too large to even count
      break;
    }
    v.full_size *= k.set.size();
  }
  double up_row = 0.0, up_col = 0.0;
  for (size_t f = 0; f < kids.size(); ++f) {
    double mr = 0.0, mc = 0.0;
    for (const auto& mmat : kids[f].set.members) {
      mr = std::max(mr, row_sum_norm(mmat));
      mc = std::max(mc, col_sum_norm(mmat));
    }
    up_row += w.weights()[f] * mr;
    up_col += w.weights()[f] * mc;
  }
  v.capped_upper = std::min(up_row, up_col);
  // subset: diagonal index tuples first, then leading lexicographic tuples
  const int m = static_cast<int>(kids.size());
  std::vector<NonNegMatrix> subset;
  int min_size = kids[0].set.size();
  for (const auto& k : kids) min_size = std::min(min_size, k.set.size());
  std::vector<NonNegMatrix> picks;
  for (int j = 0; j < min_size && static_cast<int>(subset.size()) < 4096; ++j) {
    picks.clear();
    for (int f = 0; f < m; ++f) picks.push_back(kids[f].set.members[j]);
    subset.push_back(hadamard_geometric_mean(picks, w));
  }
  std::vector<int> idx(m, 0);
  for (int count = 0; count < 1024; ++count) {
    picks.clear();
    for (int f = 0; f < m; ++f) picks.push_back(kids[f].set.members[idx[f]]);
    subset.push_back(hadamard_geometric_mean(picks, w));
    int j = m - 1;
    while (j >= 0 && ++idx[j] == kids[j].set.size()) idx[j--] = 0;
    if (j < 0) break;
  }
  v.set = MatrixSet(std::move(subset));
  return v;
}

TermSetValue eval_set_expr(const SetExpr& e, EvalCtx& ctx) {
  const std::string key = e.describe(ctx.names);
  auto it = ctx.memo.find(key);
  if (it != ctx.memo.end()) return it->second;
  TermSetValue v;
  switch (e.kind) {
    case SetExpr::Kind::input:
      v.set = ctx.inputs->sets[e.input_index];
      v.full_size = v.set.size();
      break;
    case SetExpr::Kind::product: {
      v = eval_set_expr(e.children[0], ctx);
      if (v.capped) throw BudgetError("set product over a capped operand");
      for (size_t i = 1; i < e.children.size(); ++i) {
        TermSetValue rhs = eval_set_expr(e.children[i], ctx);
        if (rhs.capped) throw BudgetError("set product over a capped operand");
        v.set = set_product(v.set, rhs.set, ctx.opts->budget.max_products);
      }
      v.full_size = v.set.size();
      break;
    }
    case SetExpr::Kind::power: {
      TermSetValue base = eval_set_expr(e.children[0], ctx);
      if (base.capped) throw BudgetError("set power over a capped operand");
      v.set = set_power(base.set, e.power_k, ctx.opts->budget.max_products);
      v.full_size = v.set.size();
      break;
    }
    case SetExpr::Kind::hmean:
      v = eval_hmean(e, ctx);
      break;
  }
  ctx.memo.emplace(key, v);
  return v;
}

KernelModel eval_kernel_expr(const SetExpr& e, const ChainInputs& inputs) {
  switch (e.kind) {
    case SetExpr::Kind::input:
      return inputs.kernels[e.input_index];
    case SetExpr::Kind::product: {
      KernelModel km = eval_kernel_expr(e.children[0], inputs);
      for (size_t i = 1; i < e.children.size(); ++i)
        km = kernel_compose(km, eval_kernel_expr(e.children[i], inputs));
      return km;
    }
    case SetExpr::Kind::power: {
      KernelModel base = eval_kernel_expr(e.children[0], inputs);
      KernelModel km = base;
      for (int i = 1; i < e.power_k; ++i) km = kernel_compose(km, base);
      return km;
    }
    case SetExpr::Kind::hmean: {
      std::vector<KernelModel> kids;
      for (const auto& ch : e.children) kids.push_back(eval_kernel_expr(ch, inputs));
      return kernel_hadamard_mean(kids, WeightVector(e.weights, e.wmode));
    }
  }
  throw DomainError("unreachable kernel expression kind");
}

RadiusBracket bracket_for_expr(const SetExpr& e, EvalCtx& ctx, bool exact, FactorRecord& rec) {
  const std::string key = e.describe(ctx.names);
  rec.expr = key;
  auto hit = ctx.bracket_memo.find(key);
  if (hit != ctx.bracket_memo.end()) {
    rec.set_size = hit->second.set_size;
    rec.capped_bounds = hit->second.capped;
    return hit->second.bracket;
  }
  CachedBracket cb;
  if (ctx.inputs->kernel_mode) {
    const KernelModel km = eval_kernel_expr(e, *ctx.inputs);
    cb.bracket = spectral_radius_bracket(to_matrix(km), ctx.opts->budget.bracket_tol_rel,
                                         ctx.opts->budget.bracket_max_iter);
    cb.set_size = 1;
  } else if (exact) {
    const TermSetValue v = eval_set_expr(e, ctx);
    const double r = spectral_radius_exact_small(v.set.members[0]);
    cb.bracket.lower = cb.bracket.upper = r;
    cb.bracket.method = "exact";
    cb.set_size = 1;
  } else {
    TermSetValue v = eval_set_expr(e, ctx);
    cb.set_size = v.capped ? v.full_size : v.set.size();
    if (v.capped) {
      const SetRadiusResult sub = radius_bracket_detailed(v.set, ctx.opts->budget);
      cb.bracket.lower = std::min(sub.bracket.lower, v.capped_upper);
      cb.bracket.upper = v.capped_upper;
      cb.bracket.lower_depth = sub.bracket.lower_depth;
      cb.bracket.upper_depth = 1;
      cb.bracket.method = "hmean-capped";
      cb.bracket.converged = false;
      cb.capped = true;
    } else {
      cb.bracket = radius_bracket(v.set, ctx.opts->budget);
    }
  }
  ctx.bracket_memo.emplace(key, cb);
  rec.set_size = cb.set_size;
  rec.capped_bounds = cb.capped;
  return cb.bracket;
}

std::string input_digest_of(const ChainInputs& inputs, const ChainParams& params) {
  std::string d = "dim=" + std::to_string(inputs.dim());
  d += inputs.kernel_mode ? ",kernels=" : ",sizes=";
  if (inputs.kernel_mode) {
    d += std::to_string(inputs.kernels.size());
  } else {
    d += "[";
    for (size_t i = 0; i < inputs.sets.size(); ++i) {
      if (i) d += ",";
      d += std::to_string(inputs.sets[i].size());
    }
    d += "]";
  }
  d += ",alpha=" + fmt_num(params.alpha) + ",k=" + std::to_string(params.k);
  if (!params.weights.empty()) {
    d += ",w=[";
    for (size_t i = 0; i < params.weights.size(); ++i) {
      if (i) d += ",";
      d += fmt_num(params.weights[i]);
    }
    d += "]";
  }
  return d;
}

}  // namespace

ChainReport evaluate_chain(const ChainSpec& spec, const ChainInputs& inputs,
                           const ChainParams& params, const EvalOptions& options) {
  const int m = inputs.kernel_mode ? static_cast<int>(inputs.kernels.size())
                                   : static_cast<int>(inputs.sets.size());
  if (spec.operand_count >= 0 && m != spec.operand_count)
    throw DimensionError("chain " + spec.id + " expects " + std::to_string(spec.operand_count) +
                         " operands, got " + std::to_string(m));
  if (spec.operand_count < 0 && m < 2)
    throw DimensionError("chain " + spec.id + " expects at least 2 operands");
  if (inputs.kernel_mode && !spec.kernel_applicable)
    throw DomainError("chain " + spec.id + " is not a kernel chain");
  if (spec.uses_weights && static_cast<int>(params.weights.size()) != m)
    throw DimensionError("chain " + spec.id + " needs " + std::to_string(m) + " weights");

  ChainReport rep;
  rep.chain_id = spec.id;
  rep.params = params;
  rep.operand_count = m;
  rep.dim = inputs.dim();
  rep.input_digest = input_digest_of(inputs, params);

  bool exact = options.prefer_exact && !inputs.kernel_mode && !spec.set_operands &&
               inputs.dim() <= 3;
  if (exact)
    for (const auto& s : inputs.sets) exact = exact && s.size() == 1;
  rep.exact_mode = exact;

  EvalCtx ctx;
  ctx.inputs = &inputs;
  ctx.opts = &options;
  for (int i = 0; i < m; ++i) ctx.names.push_back("S" + std::to_string(i));

  const auto branches = spec.build(m, params);
  bool any_violation = false, any_inconclusive = false;
  for (const auto& branch : branches) {
    BranchReport br;
    std::vector<bool> term_ok(branch.size(), true);
    std::vector<double> term_lower(branch.size(), 1.0), term_upper(branch.size(), 1.0);
    for (size_t t = 0; t < branch.size(); ++t) {
      std::vector<FactorRecord> recs;
      double lom = 1.0, upm = 1.0;
      try {
        for (const auto& f : branch[t]) {
          FactorRecord rec;
          rec.exponent = f.exponent;
          if (f.exponent == 0.0) {  // radius^0 contributes 1; record, skip value
            rec.expr = f.expr.describe(ctx.names);
            recs.push_back(rec);
            continue;
          }
          rec.bracket = bracket_for_expr(f.expr, ctx, exact, rec);
          lom *= std::pow(rec.bracket.lower, f.exponent);
          upm *= std::pow(rec.bracket.upper, f.exponent);
          recs.push_back(rec);
        }
      } catch (const BudgetError&) {
        term_ok[t] = false;
      }
      term_lower[t] = lom;
      term_upper[t] = upm;
      br.terms.push_back(std::move(recs));
    }
    for (size_t t = 0; t + 1 < branch.size(); ++t) {
      PairRecord pr;
      pr.left_term = static_cast<int>(t);
      pr.right_term = static_cast<int>(t + 1);
      if (!term_ok[t] || !term_ok[t + 1]) {
        pr.verdict = "inconclusive-budget";
        any_inconclusive = true;
      } else {
        pr.left_value = term_lower[t];
        pr.right_value = term_upper[t + 1];
        if (pr.left_value <= pr.right_value * (1.0 + options.tol)) {
          pr.verdict = "consistent";
        } else {
          pr.verdict = "violation";
          any_violation = true;
        }
      }
      br.pairs.push_back(pr);
    }
    rep.branches.push_back(std::move(br));
  }
  rep.overall =
      any_violation ? "violation" : (any_inconclusive ? "inconclusive-budget" : "consistent");
  if (any_violation) rep.counterexample = chain_inputs_to_text(inputs, params);
  return rep;
}

// ---------------------------------------------------------------------------
// randomized campaign

namespace {

NonNegMatrix draw_matrix(Rng& rng, int dim) {
  std::vector<double> e(static_cast<size_t>(dim) * dim, 0.0);
  for (auto& v : e) {
    const double gate = rng.uniform01();
    const double val = rng.uniform01();
    if (gate >= 0.30) v = val;  // 30% zero mask
  }
  return NonNegMatrix(dim, std::move(e));
}

}  // namespace

ChainInputs draw_chain_inputs(const ChainSpec& spec, std::uint64_t child_seed, int dim_lo,
                              int dim_hi, int size_lo, int size_hi, ChainParams& params_out,
                              int& m_out) {
  Rng rng(child_seed);
  const int dim = static_cast<int>(rng.uniform_int(dim_lo, dim_hi));
  int m = spec.operand_count;
  if (m < 0) m = static_cast<int>(rng.uniform_int(2, spec.set_operands ? 3 : 4));
  params_out = ChainParams{};
  if (spec.uses_alpha) params_out.alpha = rng.uniform01();
  if (spec.uses_k) params_out.k = static_cast<int>(rng.uniform_int(1, 4));
  if (spec.uses_weights) {
    std::vector<double> w(m);
    double sum = 0.0;
    for (auto& v : w) {
      v = rng.uniform(0.2, 1.0);
      sum += v;
    }
    double partial = 0.0;
    for (int i = 0; i + 1 < m; ++i) {
      w[i] /= sum;
      partial += w[i];
    }
    w[m - 1] = 1.0 - partial;
    params_out.weights = std::move(w);
  }
  ChainInputs inputs;
  for (int i = 0; i < m; ++i) {
    const int size = spec.set_operands ? static_cast<int>(rng.uniform_int(size_lo, size_hi)) : 1;
    std::vector<NonNegMatrix> members;
    members.reserve(size);
    for (int s = 0; s < size; ++s) members.push_back(draw_matrix(rng, dim));
    inputs.sets.emplace_back(std::move(members), "S" + std::to_string(i));
  }
  m_out = m;
  return inputs;
}

std::string chain_inputs_to_text(const ChainInputs& inputs, const ChainParams& params) {
  std::string out;
  out += "alpha=" + fmt_num(params.alpha) + " k=" + std::to_string(params.k);
  if (!params.weights.empty()) {
    out += " weights=[";
    for (size_t i = 0; i < params.weights.size(); ++i) {
      if (i) out += ",";
      out += fmt_num(params.weights[i]);
    }
    out += "]";
  }
  out += "\n";
  for (size_t s = 0; s < inputs.sets.size(); ++s) {
    const auto& set = inputs.sets[s];
    out += "set S" + std::to_string(s) + " (dim " + std::to_string(set.dim) + ", " +
           std::to_string(set.size()) + " members)\n";
    for (int k = 0; k < set.size(); ++k) {
      out += "  member " + std::to_string(k) + ":\n";
      for (int i = 0; i < set.dim; ++i) {
        out += "    [";
        for (int j = 0; j < set.dim; ++j) {
          if (j) out += ", ";
          out += fmt_num(set.members[k](i, j));
        }
        out += "]\n";
      }
    }
  }
  return out;
}

CampaignResult randomized_campaign(const CampaignConfig& config) {
  if (config.trials < 1) throw DomainError("campaign needs trials >= 1");
  if (config.dim_lo < 1 || config.dim_lo > config.dim_hi)
    throw DomainError("campaign dims range is empty");
  if (config.size_lo < 1 || config.size_lo > config.size_hi)
    throw DomainError("campaign sizes range is empty");
  std::vector<const ChainSpec*> selected;
  if (config.chain_ids.empty()) {
    for (const auto& c : chain_catalog()) selected.push_back(&c);
  } else {
    for (const auto& id : config.chain_ids) selected.push_back(&chain_by_id(id));
  }

  struct Task {
    int trial;
    int chain_index;  // into selected
  };
  std::vector<Task> tasks;
  tasks.reserve(static_cast<size_t>(config.trials) * selected.size());
  for (int t = 0; t < config.trials; ++t)
    for (size_t c = 0; c < selected.size(); ++c) tasks.push_back({t, static_cast<int>(c)});

  CampaignResult result;
  result.reports.resize(tasks.size());

  auto run_task = [&](size_t idx) {
    const Task& task = tasks[idx];
    const ChainSpec& spec = *selected[task.chain_index];
    // child seed mixes trial and the catalog position of the chain, so a
    // subset run reproduces the full run's inputs for the same chain
    std::uint64_t catalog_pos = 0;
    for (size_t i = 0; i < chain_catalog().size(); ++i)
      if (chain_catalog()[i].id == spec.id) catalog_pos = i;
    const std::uint64_t child =
        Rng::mix(config.seed, (static_cast<std::uint64_t>(task.trial) << 8) | catalog_pos);
    ChainParams params;
    int m = 0;
    const ChainInputs inputs = draw_chain_inputs(spec, child, config.dim_lo, config.dim_hi,
                                                 config.size_lo, config.size_hi, params, m);
    ChainReport rep = evaluate_chain(spec, inputs, params, config.options);
    rep.input_digest = "seed=" + std::to_string(config.seed) +
                       ",trial=" + std::to_string(task.trial) + "," + rep.input_digest;
    result.reports[idx] = std::move(rep);
  };

  const int nw = std::max(1, config.workers);
  if (nw == 1) {
    for (size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= tasks.size()) break;
          run_task(i);
        }
      });
    for (auto& t : pool) t.join();
  }

  for (const auto& r : result.reports) {
    if (r.overall == "violation")
      ++result.violations;
    else if (r.overall == "inconclusive-budget")
      ++result.inconclusive;
    else
      ++result.consistent;
  }
  return result;
}

}  // namespace hjsr
