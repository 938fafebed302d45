// hjsr: certified brackets for generalized/joint spectral radii of
// non-negative matrix sets, Hadamard-mean inequality verification, and
// quadrature-discretized kernel operators.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hjsr/chains.hpp"
#include "hjsr/io.hpp"
#include "hjsr/kernel.hpp"
#include "hjsr/matrix_set.hpp"
#include "hjsr/rng.hpp"

namespace {

using hjsr::ordered_json;

struct RangeOpt {
  int lo = 0, hi = 0;
};

RangeOpt parse_range(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos)
    throw hjsr::ParseError("range must look like LO..HI, got '" + s + "'");
  RangeOpt r;
  try {
    r.lo = std::stoi(s.substr(0, pos));
    r.hi = std::stoi(s.substr(pos + 2));
  } catch (...) {
    throw hjsr::ParseError("range must look like LO..HI, got '" + s + "'");
  }
  if (r.lo > r.hi) throw hjsr::ParseError("empty range '" + s + "'");
  return r;
}

std::vector<std::string> parse_chain_list(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty() || s == "all") return out;  // empty = all
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  for (const auto& id : out) hjsr::chain_by_id(id);  // validates
  return out;
}

double wall_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_report(const std::string& path, const ordered_json& j) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hjsr::ParseError("cannot write report to " + path);
  out << j.dump(2) << "\n";
}

hjsr::EnumerationBudget budget_from_flags(int depth, const std::string& prune,
                                          long long max_products) {
  hjsr::EnumerationBudget b;
  b.max_depth = depth;
  b.max_products = max_products;
  if (!prune.empty()) {
    b.pruning = hjsr::PruningMode::gripenberg;
    if (prune != "auto") b.gripenberg_delta = std::stod(prune);
  }
  return b;
}

// ---------------------------------------------------------------------- radius

int run_radius(const std::string& input_path, const std::string& set_name, int depth,
               const std::string& prune, int workers, const std::string& out_path) {
  const hjsr::InputDocument doc = hjsr::parse_input_file(input_path);
  const hjsr::MatrixSet& s = doc.set_or_singleton(set_name);
  hjsr::EnumerationBudget budget = budget_from_flags(depth, prune, 2'000'000);
  if (budget.max_products < s.size()) budget.max_products = s.size();
  const auto t0 = std::chrono::steady_clock::now();
  const hjsr::SetRadiusResult res = hjsr::radius_bracket_detailed(s, budget, workers);
  const double secs = wall_seconds(t0);

  std::printf("set %-12s dim %d, %d members\n", set_name.c_str(), s.dim, s.size());
  std::printf("  lower    %.12g  (depth %d)\n", res.bracket.lower, res.bracket.lower_depth);
  std::printf("  upper    %.12g  (depth %d)\n", res.bracket.upper, res.bracket.upper_depth);
  std::printf("  width    %.3g\n", res.bracket.width());
  std::printf("  products %lld%s\n", res.products_evaluated,
              res.budget_capped ? "  (depth capped by budget)" : "");
  std::printf("  method   %s\n", res.bracket.method.c_str());
  if (!res.lower_word.empty()) {
    std::printf("  lower witness word:");
    for (int ix : res.lower_word) std::printf(" %d", ix);
    std::printf("\n");
  }

  std::ifstream f(input_path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  ordered_json rep = hjsr::make_report_document(hjsr::digest_hex(bytes));
  ordered_json rj;
  rj["set"] = set_name;
  rj["dim"] = s.dim;
  rj["members"] = s.size();
  rj["bracket"] = hjsr::bracket_to_json(res.bracket);
  rj["products_evaluated"] = res.products_evaluated;
  rj["effective_depth"] = res.effective_depth;
  rj["budget_capped"] = res.budget_capped;
  rj["lower_word"] = res.lower_word;
  if (res.pruning_threshold > 0.0) {
    rj["pruning_delta"] = res.pruning_delta;
    rj["pruning_threshold"] = res.pruning_threshold;
  }
  rep["radii"] = ordered_json::array({rj});
  rep["timings"] = {{"radius_seconds", secs}};
  write_report(out_path, rep);
  return 0;
}

// ---------------------------------------------------------------------- verify

int run_verify(const std::string& input_path, bool have_random, std::uint64_t seed, int trials,
               const std::string& chains, const std::string& dims, const std::string& sizes,
               int depth, double tol, const std::string& prune, int workers,
               const std::string& out_path) {
  hjsr::EvalOptions options;
  options.budget = budget_from_flags(depth, prune.empty() ? "auto" : prune, 40'000);
  options.tol = tol;

  ordered_json reports = ordered_json::array();
  long violations = 0, inconclusive = 0, consistent = 0;
  std::string digest_src;
  const auto t0 = std::chrono::steady_clock::now();

  if (have_random) {
    hjsr::CampaignConfig cfg;
    cfg.seed = seed;
    cfg.trials = trials;
    const RangeOpt dr = parse_range(dims.empty() ? "2..4" : dims);
    const RangeOpt sr = parse_range(sizes.empty() ? "1..3" : sizes);
    cfg.dim_lo = dr.lo;
    cfg.dim_hi = dr.hi;
    cfg.size_lo = sr.lo;
    cfg.size_hi = sr.hi;
    cfg.chain_ids = parse_chain_list(chains);
    cfg.options = options;
    cfg.workers = workers;
    digest_src = "random seed=" + std::to_string(seed) + " trials=" + std::to_string(trials) +
                 " dims=" + std::to_string(dr.lo) + ".." + std::to_string(dr.hi) +
                 " sizes=" + std::to_string(sr.lo) + ".." + std::to_string(sr.hi) +
                 " depth=" + std::to_string(depth) + " tol=" + std::to_string(tol);
    const hjsr::CampaignResult res = hjsr::randomized_campaign(cfg);
    violations = res.violations;
    inconclusive = res.inconclusive;
    consistent = res.consistent;
    for (const auto& r : res.reports) {
      reports.push_back(hjsr::chain_report_to_json(r));
      if (r.overall == "violation") {
        std::printf("VIOLATION %s  %s\n", r.chain_id.c_str(), r.input_digest.c_str());
        std::printf("certified counterexample inputs:\n%s", r.counterexample.c_str());
      }
    }
  } else {
    if (input_path.empty())
      throw hjsr::ParseError("verify needs --input FILE or --random SEED TRIALS");
    const hjsr::InputDocument doc = hjsr::parse_input_file(input_path);
    std::ifstream f(input_path, std::ios::binary);
    digest_src.assign((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const auto selected = parse_chain_list(chains);
    if (doc.checks.empty() && !doc.campaign)
      throw hjsr::ParseError("input file has neither checks nor a campaign block");
    for (const auto& check : doc.checks) {
      if (!selected.empty() &&
          std::find(selected.begin(), selected.end(), check.chain) == selected.end())
        continue;
      const hjsr::ChainSpec& spec = hjsr::chain_by_id(check.chain);
      hjsr::ChainInputs inputs;
      for (const auto& opname : check.operands) inputs.sets.push_back(doc.set_or_singleton(opname));
      if (!spec.set_operands)
        for (const auto& s : inputs.sets)
          if (s.size() != 1)
            throw hjsr::ParseError("chain " + check.chain + " takes single matrices; '" +
                                   s.label + "' has " + std::to_string(s.size()) + " members");
      hjsr::ChainParams params;
      params.alpha = check.alpha;
      params.k = check.k;
      if (spec.uses_weights) {
        if (!check.weights_name.empty())
          params.weights = doc.weight_vectors.at(check.weights_name).weights();
        else
          params.weights = hjsr::WeightVector::uniform(static_cast<int>(inputs.sets.size())).weights();
      }
      hjsr::ChainReport rep = hjsr::evaluate_chain(spec, inputs, params, options);
      if (!check.expect_terms.empty() && rep.overall == "consistent") {
        // hand-checked per-term values (first branch); bracket must contain them
        const auto& branch = rep.branches.at(0);
        for (size_t t = 0; t < check.expect_terms.size() && t < branch.terms.size(); ++t) {
          double lo = 1.0, hi = 1.0;
          for (const auto& fr : branch.terms[t]) {
            if (fr.exponent == 0.0) continue;
            lo *= std::pow(fr.bracket.lower, fr.exponent);
            hi *= std::pow(fr.bracket.upper, fr.exponent);
          }
          const double want = check.expect_terms[t];
          const double slack = 1e-7 * std::max(1.0, want);
          if (want < lo - slack || want > hi + slack) {
            rep.overall = "violation";
            rep.counterexample = "expected term " + std::to_string(t) + " value " +
                                 std::to_string(want) + " lies outside bracket [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]";
          }
        }
      }
      if (rep.overall == "violation") {
        ++violations;
        std::printf("VIOLATION %s\n%s\n", rep.chain_id.c_str(), rep.counterexample.c_str());
      } else if (rep.overall == "inconclusive-budget") {
        ++inconclusive;
      } else {
        ++consistent;
      }
      std::printf("%-4s %-14s %s\n", rep.chain_id.c_str(), rep.overall.c_str(),
                  rep.input_digest.c_str());
      reports.push_back(hjsr::chain_report_to_json(rep));
    }
    if (doc.campaign) {
      const auto& c = *doc.campaign;
      hjsr::CampaignConfig cfg;
      cfg.seed = c.seed;
      cfg.trials = c.trials;
      cfg.dim_lo = c.dim_lo;
      cfg.dim_hi = c.dim_hi;
      cfg.size_lo = c.size_lo;
      cfg.size_hi = c.size_hi;
      cfg.chain_ids = c.chains;
      cfg.options = options;
      cfg.options.tol = c.tol;
      cfg.options.budget.max_depth = c.depth;
      cfg.options.budget.pruning =
          c.pruning == "off" ? hjsr::PruningMode::off : hjsr::PruningMode::gripenberg;
      cfg.workers = workers;
      const hjsr::CampaignResult res = hjsr::randomized_campaign(cfg);
      violations += res.violations;
      inconclusive += res.inconclusive;
      consistent += res.consistent;
      for (const auto& r : res.reports) {
        reports.push_back(hjsr::chain_report_to_json(r));
        if (r.overall == "violation") {
          std::printf("VIOLATION %s  %s\n", r.chain_id.c_str(), r.input_digest.c_str());
          std::printf("certified counterexample inputs:\n%s", r.counterexample.c_str());
        }
      }
    }
  }
  const double secs = wall_seconds(t0);
  std::printf("verify: %ld consistent, %ld violations, %ld inconclusive (%.1fs)\n", consistent,
              violations, inconclusive, secs);

  ordered_json rep = hjsr::make_report_document(hjsr::digest_hex(digest_src));
  rep["mode"] = have_random ? "random" : "curated";
  rep["parameters"] = {{"depth", depth}, {"tol", tol}};
  if (have_random) {
    rep["parameters"]["seed"] = seed;
    rep["parameters"]["trials"] = trials;
  }
  rep["summary"] = {{"consistent", consistent},
                    {"violations", violations},
                    {"inconclusive", inconclusive}};
  rep["chains"] = reports;
  rep["timings"] = {{"verify_seconds", secs}};
  write_report(out_path, rep);

  if (violations > 0) return 1;
  if (inconclusive > 0) return 3;
  return 0;
}

// ---------------------------------------------------------------------- kernel

int run_kernel(const std::string& input_path, const std::string& kernels_csv,
               const std::string& chains, const std::string& grids_csv,
               const std::string& out_path, const std::string& csv_path, int depth, double tol) {
  std::vector<std::pair<std::string, hjsr::KernelSpec>> catalog;
  if (!input_path.empty()) {
    const hjsr::InputDocument doc = hjsr::parse_input_file(input_path);
    for (const auto& name : doc.entry_order)
      if (doc.kernels.count(name)) catalog.emplace_back(name, doc.kernels.at(name));
  } else {
    catalog.emplace_back("constant", hjsr::KernelSpec::constant(1.0));
    catalog.emplace_back("exp_abs", hjsr::KernelSpec::exp_abs(1.0));
    catalog.emplace_back("gaussian", hjsr::KernelSpec::gaussian(4.0));
    catalog.emplace_back("separable", hjsr::KernelSpec::separable({0.5, 1.0}, {0.5, 1.0}));
    catalog.emplace_back("piecewise", hjsr::KernelSpec::piecewise_random(7, 4));
  }
  if (!kernels_csv.empty()) {
    std::vector<std::pair<std::string, hjsr::KernelSpec>> filtered;
    std::string cur;
    std::vector<std::string> names;
    for (char c : kernels_csv + ",") {
      if (c == ',') {
        if (!cur.empty()) names.push_back(cur);
        cur.clear();
      } else
        cur += c;
    }
    for (const auto& nm : names) {
      bool found = false;
      for (const auto& [knm, spec] : catalog)
        if (knm == nm) {
          filtered.emplace_back(knm, spec);
          found = true;
        }
      if (!found) throw hjsr::ParseError("no kernel named '" + nm + "'");
    }
    catalog = std::move(filtered);
  }
  if (catalog.empty()) throw hjsr::ParseError("no kernel specs selected");

  std::vector<std::string> chain_ids = parse_chain_list(chains);
  if (chain_ids.empty()) chain_ids = {"C7", "C8", "C9", "C10"};
  for (const auto& id : chain_ids) {
    const auto& spec = hjsr::chain_by_id(id);
    if (!spec.kernel_applicable)
      throw hjsr::ParseError("chain " + id + " is not a kernel chain (use C7..C10)");
  }

  std::vector<int> grids;
  {
    std::string cur;
    for (char c : (grids_csv.empty() ? std::string("16,32,64") : grids_csv) + ",") {
      if (c == ',') {
        if (!cur.empty()) grids.push_back(std::stoi(cur));
        cur.clear();
      } else
        cur += c;
    }
    for (int g : grids)
      if (g != 8 && g != 16 && g != 32 && g != 64 && g != 128)
        throw hjsr::ParseError("grids must be drawn from {8,16,32,64,128}");
  }

  hjsr::EvalOptions options;
  options.budget.max_depth = depth;
  options.budget.bracket_max_iter = 20000;
  options.tol = tol;
  options.prefer_exact = false;

  struct Row {
    std::string chain, kernels;
    int grid;
    int branch, term, factor;
    std::string expr;
    double lower, upper, mid, residual;
  };
  std::vector<Row> rows;
  ordered_json chain_reports = ordered_json::array();
  long violations = 0, inconclusive = 0;
  const auto t0 = std::chrono::steady_clock::now();

  auto eval_case = [&](const std::string& id, const std::vector<int>& kidx) {
    const auto& spec = hjsr::chain_by_id(id);
    std::string label;
    for (size_t i = 0; i < kidx.size(); ++i)
      label += (i ? "," : "") + catalog[kidx[i]].first;
    std::map<std::string, double> prev_mid;  // factor key -> mid at previous grid
    for (int n : grids) {
      hjsr::ChainInputs inputs;
      inputs.kernel_mode = true;
      for (int ki : kidx) inputs.kernels.push_back(hjsr::discretize(catalog[ki].second, n));
      hjsr::ChainParams params;  // C7..C10 take no params
      hjsr::ChainReport rep = hjsr::evaluate_chain(spec, inputs, params, options);
      if (rep.overall == "violation") ++violations;
      if (rep.overall == "inconclusive-budget") ++inconclusive;
      std::printf("%-4s [%s] n=%-3d %s\n", id.c_str(), label.c_str(), n, rep.overall.c_str());
      for (size_t b = 0; b < rep.branches.size(); ++b) {
        const auto& br = rep.branches[b];
        for (size_t t = 0; t < br.terms.size(); ++t) {
          for (size_t f = 0; f < br.terms[t].size(); ++f) {
            const auto& fr = br.terms[t][f];
            if (fr.exponent == 0.0) continue;
            Row row;
            row.chain = id;
            row.kernels = label;
            row.grid = n;
            row.branch = static_cast<int>(b);
            row.term = static_cast<int>(t);
            row.factor = static_cast<int>(f);
            row.expr = fr.expr;
            row.lower = std::pow(fr.bracket.lower, fr.exponent);
            row.upper = std::pow(fr.bracket.upper, fr.exponent);
            row.mid = 0.5 * (row.lower + row.upper);
            const std::string key =
                id + "|" + label + "|" + std::to_string(b) + "|" + std::to_string(t) + "|" +
                std::to_string(f);
            row.residual = prev_mid.count(key) ? std::abs(row.mid - prev_mid[key]) : 0.0;
            prev_mid[key] = row.mid;
            rows.push_back(row);
          }
        }
      }
      ordered_json rj = hjsr::chain_report_to_json(rep);
      rj["kernels"] = label;
      rj["grid"] = n;
      chain_reports.push_back(rj);
    }
  };

  for (const auto& id : chain_ids) {
    const auto& spec = hjsr::chain_by_id(id);
    if (spec.operand_count == 2) {
      for (size_t i = 0; i < catalog.size(); ++i)
        for (size_t j = 0; j < catalog.size(); ++j)
          eval_case(id, {static_cast<int>(i), static_cast<int>(j)});
    } else {
      std::vector<int> all(catalog.size());
      for (size_t i = 0; i < catalog.size(); ++i) all[i] = static_cast<int>(i);
      if (all.size() < 2) all = {0, 0};
      eval_case(id, all);
    }
  }
  const double secs = wall_seconds(t0);

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw hjsr::ParseError("cannot write csv to " + csv_path);
    csv << "chain,kernels,grid,branch,term,factor,expr,lower,upper,mid,residual_vs_prev_grid\n";
    char buf[512];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%s,\"%s\",%d,%d,%d,%d,\"%s\",%.17g,%.17g,%.17g,%.17g\n",
                    r.chain.c_str(), r.kernels.c_str(), r.grid, r.branch, r.term, r.factor,
                    r.expr.c_str(), r.lower, r.upper, r.mid, r.residual);
      csv << buf;
    }
  }
  std::printf("kernel: %zu evaluations, %ld violations, %ld inconclusive (%.1fs)\n",
              chain_reports.size(), violations, inconclusive, secs);

  std::string digest_src = "kernel";
  for (const auto& [nm, spec] : catalog) digest_src += " " + nm;
  ordered_json rep = hjsr::make_report_document(hjsr::digest_hex(digest_src));
  rep["chains"] = chain_reports;
  rep["timings"] = {{"kernel_seconds", secs}};
  write_report(out_path, rep);

  if (violations > 0) return 1;
  if (inconclusive > 0) return 3;
  return 0;
}

// ---------------------------------------------------------------------- bench

int run_bench(int set_size, int dim, int depth, std::uint64_t seed, int workers,
              const std::string& prune, const std::string& out_path) {
  hjsr::Rng rng(seed);
  std::vector<hjsr::NonNegMatrix> members;
  for (int s = 0; s < set_size; ++s) {
    std::vector<double> e(static_cast<size_t>(dim) * dim);
    for (auto& v : e) v = rng.uniform01();
    members.emplace_back(dim, std::move(e));
  }
  const hjsr::MatrixSet set(std::move(members), "bench");

  hjsr::EnumerationBudget exhaustive;
  exhaustive.max_depth = depth;
  exhaustive.max_products = 50'000'000;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res_e = hjsr::radius_bracket_detailed(set, exhaustive, workers);
  const double secs_e = wall_seconds(t0);

  hjsr::EnumerationBudget pruned = exhaustive;
  pruned.pruning = hjsr::PruningMode::gripenberg;
  if (!prune.empty() && prune != "auto") pruned.gripenberg_delta = std::stod(prune);
  const auto t1 = std::chrono::steady_clock::now();
  const auto res_p = hjsr::radius_bracket_detailed(set, pruned, workers);
  const double secs_p = wall_seconds(t1);

  const double ratio =
      static_cast<double>(res_p.products_evaluated) / static_cast<double>(res_e.products_evaluated);
  const double delta = res_p.pruning_delta;
  const double scale = std::max(1.0, res_e.bracket.upper);
  const bool brackets_agree =
      std::abs(res_p.bracket.lower - res_e.bracket.lower) <= delta + 1e-12 * scale &&
      std::abs(res_p.bracket.upper - res_e.bracket.upper) <= delta + 1e-12 * scale;

  std::printf("bench |S|=%d dim=%d depth=%d seed=%llu workers=%d\n", set_size, dim, depth,
              static_cast<unsigned long long>(seed), workers);
  std::printf("  exhaustive: %lld products, bracket [%.12g, %.12g], %.3fs\n",
              res_e.products_evaluated, res_e.bracket.lower, res_e.bracket.upper, secs_e);
  std::printf("  pruned:     %lld products, bracket [%.12g, %.12g], %.3fs (delta %.3g)\n",
              res_p.products_evaluated, res_p.bracket.lower, res_p.bracket.upper, secs_p, delta);
  std::printf("  evaluated ratio %.3f, brackets %s within delta\n", ratio,
              brackets_agree ? "agree" : "DISAGREE");

  ordered_json rep = hjsr::make_report_document(
      hjsr::digest_hex("bench " + std::to_string(set_size) + " " + std::to_string(dim) + " " +
                       std::to_string(depth) + " " + std::to_string(seed)));
  rep["bench"] = {{"set_size", set_size},
                  {"dim", dim},
                  {"depth", depth},
                  {"seed", seed},
                  {"exhaustive_products", res_e.products_evaluated},
                  {"pruned_products", res_p.products_evaluated},
                  {"ratio", ratio},
                  {"delta", delta},
                  {"brackets_agree", brackets_agree},
                  {"exhaustive_bracket", hjsr::bracket_to_json(res_e.bracket)},
                  {"pruned_bracket", hjsr::bracket_to_json(res_p.bracket)}};
  rep["timings"] = {{"exhaustive_seconds", secs_e}, {"pruned_seconds", secs_p}};
  write_report(out_path, rep);
  return brackets_agree ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified spectral-radius brackets and Hadamard-mean inequality checks"};
  app.require_subcommand(1);

  std::string input_path, out_path, csv_path, set_name, chains = "all", prune, kernels_csv;
  std::string dims = "2..4", sizes = "1..3", grids;
  int depth = 6;
  double tol = 1e-9;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  std::vector<std::uint64_t> random_args;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--depth", depth, "max product depth")
        ->envname("HJSR_DEFAULT_DEPTH");
    cmd->add_option("--workers", workers, "worker threads");
    cmd->add_option("--out", out_path, "machine-readable report path");
    cmd->add_option("--prune", prune, "gripenberg pruning, optional delta")
        ->expected(0, 1)
        ->default_str("")
        ->type_name("[DELTA]");
  };

  CLI::App* radius = app.add_subcommand("radius", "certified bracket for a named set");
  radius->add_option("--input", input_path, "input file")->required();
  radius->add_option("--set", set_name, "set entry name")->required();
  add_common(radius);

  CLI::App* verify = app.add_subcommand("verify", "evaluate inequality chains");
  verify->add_option("--input", input_path, "input file with checks");
  verify->add_option("--random", random_args, "SEED TRIALS randomized campaign")->expected(2);
  verify->add_option("--chains", chains, "all or comma list C1,..,C19");
  verify->add_option("--dims", dims, "dimension range LO..HI");
  verify->add_option("--sizes", sizes, "set size range LO..HI");
  verify->add_option("--tol", tol, "relative comparison tolerance");
  add_common(verify);

  CLI::App* kernel = app.add_subcommand("kernel", "kernel chains C7..C10 on quadrature grids");
  kernel->add_option("--input", input_path, "input file with kernel_spec entries");
  kernel->add_option("--kernels", kernels_csv, "comma list of kernel names (default: all)");
  kernel->add_option("--chains", chains, "subset of C7,C8,C9,C10");
  kernel->add_option("--grids", grids, "comma list from {8,16,32,64,128}");
  kernel->add_option("--tol", tol, "relative comparison tolerance");
  kernel->add_option("--csv", csv_path, "residual table path");
  add_common(kernel);

  CLI::App* bench = app.add_subcommand("bench", "exhaustive vs pruned enumeration");
  bench->add_option("--sizes", sizes, "set size LO..HI (LO used)");
  bench->add_option("--dims", dims, "dimension LO..HI (LO used)");
  bench->add_option("--random", random_args, "SEED TRIALS (seed used)")->expected(2);
  add_common(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (radius->parsed()) {
      const std::string prune_arg =
          radius->count("--prune") ? (prune.empty() ? "auto" : prune) : "";
      return run_radius(input_path, set_name, depth, prune_arg, workers, out_path);
    }
    if (verify->parsed()) {
      const bool have_random = !random_args.empty();
      const std::uint64_t seed = have_random ? random_args[0] : 0;
      const int trials = have_random ? static_cast<int>(random_args[1]) : 0;
      const std::string prune_arg =
          verify->count("--prune") ? (prune.empty() ? "auto" : prune) : "auto";
      return run_verify(input_path, have_random, seed, trials, chains, dims, sizes, depth, tol,
                        prune_arg, workers, out_path);
    }
    if (kernel->parsed()) {
      if (chains == "all") chains = "";
      return run_kernel(input_path, kernels_csv, chains, grids, out_path, csv_path, depth, tol);
    }
    if (bench->parsed()) {
      const RangeOpt sr = parse_range(sizes);
      const RangeOpt dr = parse_range(dims);
      const std::uint64_t seed = random_args.empty() ? 42 : random_args[0];
      const std::string prune_arg =
          bench->count("--prune") ? (prune.empty() ? "auto" : prune) : "auto";
      return run_bench(sr.lo, dr.lo, depth, seed, workers, prune_arg, out_path);
    }
  } catch (const hjsr::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hjsr::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hjsr::DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hjsr::BudgetError& e) {
    std::fprintf(stderr, "budget: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
