#ifndef HJSR_CHAINS_HPP_
#define HJSR_CHAINS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hjsr/kernel.hpp"
#include "hjsr/matrix_set.hpp"

namespace hjsr {

/// Expression over set operands, built from the operations the chain catalog
/// needs: set products, set powers and Hadamard geometric means of sets.
/// Matrix chains use singleton sets through the same grammar.
struct SetExpr {
  enum class Kind { input, product, power, hmean };

  Kind kind = Kind::input;
  int input_index = 0;
  std::vector<SetExpr> children;
  int power_k = 1;
  std::vector<double> weights;  // hmean factor weights
  WeightVector::Mode wmode = WeightVector::Mode::strict_sum_one;

  static SetExpr in(int i);
  static SetExpr prod(std::vector<SetExpr> factors);
  static SetExpr pow(SetExpr base, int k);
  static SetExpr hmean(std::vector<SetExpr> factors, std::vector<double> w,
                       WeightVector::Mode mode = WeightVector::Mode::strict_sum_one);

  std::string describe(const std::vector<std::string>& names) const;
};

/// One multiplicative factor radius(expr)^exponent of a chain term.
struct TermFactor {
  SetExpr expr;
  double exponent = 1.0;
};
using Term = std::vector<TermFactor>;
using Branch = std::vector<Term>;  // adjacent terms are <=-ordered

struct ChainParams {
  double alpha = 0.5;
  int k = 2;
  std::vector<double> weights;  // strict, for weighted chains; sized at build
};

struct ChainSpec {
  std::string id;
  std::string summary;
  int operand_count = 2;       // -1: variable-length tuple
  bool set_operands = false;   // false: single matrices (as singleton sets)
  bool uses_alpha = false;
  bool uses_k = false;
  bool uses_weights = false;
  bool kernel_applicable = false;
  std::function<std::vector<Branch>(int m, const ChainParams&)> build;
};

/// The 19 inequality chains, ids C1..C19, in catalog order.
const std::vector<ChainSpec>& chain_catalog();
const ChainSpec& chain_by_id(const std::string& id);

struct FactorRecord {
  std::string expr;
  double exponent = 1.0;
  RadiusBracket bracket;
  long long set_size = 0;
  bool capped_bounds = false;  // upper came from the mean decomposition bound
};

struct PairRecord {
  int left_term = 0;
  int right_term = 0;
  double left_value = 0.0;   // product of certified lowers^exponent
  double right_value = 0.0;  // product of certified uppers^exponent
  std::string verdict;       // consistent | violation | inconclusive-budget
};

struct BranchReport {
  std::vector<std::vector<FactorRecord>> terms;
  std::vector<PairRecord> pairs;
};

struct ChainReport {
  std::string chain_id;
  std::string input_digest;
  bool exact_mode = false;
  ChainParams params;
  int operand_count = 0;
  int dim = 0;
  std::vector<BranchReport> branches;
  std::string overall;  // consistent | violation | inconclusive-budget
  std::string counterexample;  // inputs, serialized, only when overall == violation
};

struct EvalOptions {
  EnumerationBudget budget;     // per-term enumeration budget
  double tol = 1e-9;            // relative slack in pair comparisons
  bool prefer_exact = true;     // matrix chains at dims<=3 use the closed form
  long long mean_cap = 150000;  // member cap before the mean fallback bounds
};

/// Inputs are matrix sets; matrix chains pass singletons. Kernel chains pass
/// kernel models instead and compose in kernel space before bracketing.
struct ChainInputs {
  std::vector<MatrixSet> sets;
  std::vector<KernelModel> kernels;
  bool kernel_mode = false;
  int dim() const;
};

ChainReport evaluate_chain(const ChainSpec& spec, const ChainInputs& inputs,
                           const ChainParams& params, const EvalOptions& options);

struct CampaignConfig {
  std::uint64_t seed = 42;
  int trials = 1;
  int dim_lo = 2, dim_hi = 4;
  int size_lo = 1, size_hi = 3;
  std::vector<std::string> chain_ids;  // empty: all
  EvalOptions options;
  int workers = 1;
};

struct CampaignResult {
  std::vector<ChainReport> reports;  // trial-major, catalog order inside
  long violations = 0;
  long inconclusive = 0;
  long consistent = 0;
};

/// Deterministic given the seed: inputs are drawn i.i.d. uniform [0,1] with
/// an independent 30% zero mask, per (trial, chain) child seeds, so results
/// do not depend on scheduling or worker count.
CampaignResult randomized_campaign(const CampaignConfig& config);

/// Input drawing for one (trial, chain) cell; exposed for tests and for
/// reproducing counterexamples outside the campaign loop.
ChainInputs draw_chain_inputs(const ChainSpec& spec, std::uint64_t child_seed, int dim_lo,
                              int dim_hi, int size_lo, int size_hi, ChainParams& params_out,
                              int& m_out);

std::string chain_inputs_to_text(const ChainInputs& inputs, const ChainParams& params);

}  // namespace hjsr

#endif  // HJSR_CHAINS_HPP_
