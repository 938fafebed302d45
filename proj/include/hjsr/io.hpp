#ifndef HJSR_IO_HPP_
#define HJSR_IO_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hjsr/chains.hpp"
#include "hjsr/kernel.hpp"
#include "hjsr/matrix_set.hpp"

namespace hjsr {

using ordered_json = nlohmann::ordered_json;

/// One curated chain evaluation bound to named entries of the document.
struct CheckSpec {
  std::string chain;
  std::vector<std::string> operands;  // names of matrix / matrix_set entries
  std::string weights_name;           // optional, weights entry
  double alpha = 0.5;
  int k = 2;
  std::vector<double> expect_terms;  // optional hand-checked per-term values
};

struct CampaignSpec {
  std::uint64_t seed = 42;
  int trials = 1;
  int dim_lo = 2, dim_hi = 4;
  int size_lo = 1, size_hi = 3;
  int depth = 6;
  std::string pruning = "gripenberg";  // or "off"
  double tol = 1e-9;
  std::vector<std::string> chains;  // empty = all
};

/// Parsed, validated input file (versioned JSON).
struct InputDocument {
  int version = 1;
  std::map<std::string, NonNegMatrix> matrices;
  std::map<std::string, MatrixSet> sets;
  std::map<std::string, KernelSpec> kernels;
  std::map<std::string, WeightVector> weight_vectors;
  std::vector<std::string> entry_order;  // names in file order
  std::vector<CheckSpec> checks;
  std::optional<CampaignSpec> campaign;

  const MatrixSet& set_or_singleton(const std::string& name) const;
};

InputDocument parse_input(const std::string& text);
InputDocument parse_input_file(const std::string& path);
std::string serialize_input(const InputDocument& doc);

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

ordered_json bracket_to_json(const RadiusBracket& b);
ordered_json chain_report_to_json(const ChainReport& r);

/// Report skeleton shared by the CLI subcommands; `timings` is the only
/// field that may differ between reruns or worker counts.
ordered_json make_report_document(const std::string& input_digest);

}  // namespace hjsr

#endif  // HJSR_IO_HPP_
