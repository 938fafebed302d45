// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 1, 6 and 7 drive the CLI binary end to end; the rest run
// against the library directly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hjsr/chains.hpp"
#include "hjsr/io.hpp"
#include "hjsr/kernel.hpp"
#include "hjsr/matrix_set.hpp"
#include "hjsr/rng.hpp"

using namespace hjsr;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s  [%d] %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!pass) ++g_failures;
}

struct CliRunner {
  std::string cli_path;
  std::string tmp_dir;

  int run(const std::string& args, const std::string& tag) const {
    const std::string log = tmp_dir + "/" + tag + ".log";
    const std::string cmd = cli_path + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NonNegMatrix random_matrix(Rng& rng, int dim, double zero_prob = 0.3) {
  std::vector<double> e(static_cast<size_t>(dim) * dim, 0.0);
  for (auto& v : e) {
    const double gate = rng.uniform01();
    const double val = rng.uniform01();
    if (gate >= zero_prob) v = val;
  }
  return NonNegMatrix(dim, std::move(e));
}

MatrixSet random_set(Rng& rng, int dim, int size, double zero_prob = 0.3) {
  std::vector<NonNegMatrix> ms;
  for (int s = 0; s < size; ++s) ms.push_back(random_matrix(rng, dim, zero_prob));
  return MatrixSet(std::move(ms));
}

bool le_entrywise(const NonNegMatrix& a, const NonNegMatrix& b, double rtol) {
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) {
      const double x = a(i, j), y = b(i, j);
      if (x > y + rtol * std::max(std::abs(x), std::abs(y)) + 1e-300) return false;
    }
  return true;
}

// ------------------------------------------------------------------ criteria

void criterion1(const CliRunner& cli) {
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = cli.run(
      "verify --random 42 200 --chains all --dims 2..4 --sizes 1..3 --depth 6 --tol 1e-9 "
      "--out " + cli.tmp_dir + "/campaign.json",
      "criterion1");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "zero-violation campaign (seed 42, 200 trials, depth 6): exit %d, %.0fs", rc, secs);
  report(1, rc == 0, buf);
}

void criterion2() {
  const char* ids[] = {"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C18"};
  EvalOptions opt;
  opt.tol = 1e-9;
  long bad = 0, runs = 0, not_exact = 0;
  for (int t = 0; t < 500; ++t) {
    for (const char* id : ids) {
      const ChainSpec& spec = chain_by_id(id);
      const std::uint64_t child = Rng::mix(2025042, (static_cast<std::uint64_t>(t) << 8) ^
                                                        fnv1a64(id));
      ChainParams params;
      int m = 0;
      ChainInputs in =
          draw_chain_inputs(spec, child, /*dims*/ 2, 3, /*sizes*/ 1, 1, params, m);
      ChainReport rep = evaluate_chain(spec, in, params, opt);
      ++runs;
      if (!rep.exact_mode) ++not_exact;
      if (rep.overall != "consistent") ++bad;
    }
  }
  report(2, bad == 0 && not_exact == 0,
         "exact single-operator suite: " + std::to_string(runs) + " closed-form evaluations, " +
             std::to_string(bad) + " violations");
}

void criterion3() {
  Rng rng(1111);
  WeightVector half = WeightVector::uniform(2);
  long fails = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = static_cast<int>(rng.uniform_int(2, 4));

    {  // product-of-means entrywise bound plus its norm form
      const int rows = static_cast<int>(rng.uniform_int(1, 3));
      const int m = static_cast<int>(rng.uniform_int(2, 3));
      std::vector<double> w(m);
      double sum = 0;
      for (auto& v : w) {
        v = rng.uniform(0.2, 1.0);
        sum += v;
      }
      double partial = 0;
      for (int i = 0; i + 1 < m; ++i) {
        w[i] /= sum;
        partial += w[i];
      }
      w[m - 1] = 1.0 - partial;
      WeightVector wv(w);
      std::vector<std::vector<NonNegMatrix>> grid(rows);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < m; ++j) grid[i].push_back(random_matrix(rng, n));
      NonNegMatrix lhs = hadamard_geometric_mean(grid[0], wv);
      for (int i = 1; i < rows; ++i) lhs = mat_product(lhs, hadamard_geometric_mean(grid[i], wv));
      std::vector<NonNegMatrix> cols;
      for (int j = 0; j < m; ++j) {
        NonNegMatrix p = grid[0][j];
        for (int i = 1; i < rows; ++i) p = mat_product(p, grid[i][j]);
        cols.push_back(p);
      }
      NonNegMatrix rhs = hadamard_geometric_mean(cols, wv);
      if (!le_entrywise(lhs, rhs, 1e-10)) ++fails;
      double row_rhs = 1.0, col_rhs = 1.0;
      for (int j = 0; j < m; ++j) {
        row_rhs *= std::pow(row_sum_norm(cols[j]), w[j]);
        col_rhs *= std::pow(col_sum_norm(cols[j]), w[j]);
      }
      if (row_sum_norm(lhs) > row_rhs * (1 + 1e-10) + 1e-300) ++fails;
      if (col_sum_norm(lhs) > col_rhs * (1 + 1e-10) + 1e-300) ++fails;

      // AM-GM on the same draw
      NonNegMatrix gmm = hadamard_geometric_mean(grid[0], wv);
      std::vector<double> acc(static_cast<size_t>(n) * n, 0.0);
      for (int j = 0; j < m; ++j)
        for (size_t k = 0; k < acc.size(); ++k) acc[k] += w[j] * grid[0][j].entries()[k];
      if (!le_entrywise(gmm, NonNegMatrix(n, std::move(acc)), 1e-10)) ++fails;
    }

    {  // square-root mean product bounds, both orderings
      NonNegMatrix a = random_matrix(rng, n), b = random_matrix(rng, n);
      NonNegMatrix c = random_matrix(rng, n), d = random_matrix(rng, n);
      NonNegMatrix lhs = mat_product(hadamard_geometric_mean({a, b}, half),
                                     hadamard_geometric_mean({c, d}, half));
      NonNegMatrix r1 = hadamard_geometric_mean({mat_product(a, c), mat_product(b, d)}, half);
      NonNegMatrix r2 = hadamard_geometric_mean({mat_product(a, d), mat_product(b, c)}, half);
      if (!le_entrywise(lhs, r1, 1e-10)) ++fails;
      if (!le_entrywise(lhs, r2, 1e-10)) ++fails;
    }
  }
  report(3, fails == 0,
         "pointwise lemma suite: 1000 instances per inequality, " + std::to_string(fails) +
             " failures");
}

void criterion4() {
  Rng rng(40404);
  long misses = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = static_cast<int>(rng.uniform_int(2, 3));
    NonNegMatrix a = random_matrix(rng, n);
    const double exact = spectral_radius_exact_small(a);
    const auto br = spectral_radius_bracket(a);
    if (exact < br.lower - 1e-9 || exact > br.upper + 1e-9) ++misses;
  }
  long delta_misses = 0;
  Rng rng2(50505);
  for (int t = 0; t < 100; ++t) {
    MatrixSet s = random_set(rng2, static_cast<int>(rng2.uniform_int(2, 4)),
                             static_cast<int>(rng2.uniform_int(1, 3)));
    EnumerationBudget exact;
    exact.max_depth = 6;
    EnumerationBudget pruned = exact;
    pruned.pruning = PruningMode::gripenberg;
    const auto re = radius_bracket_detailed(s, exact);
    const auto rp = radius_bracket_detailed(s, pruned);
    const double slack = rp.pruning_delta + 1e-12 * std::max(1.0, re.bracket.upper);
    if (rp.bracket.lower < re.bracket.lower - slack ||
        rp.bracket.upper > re.bracket.upper + slack ||
        rp.bracket.lower > re.bracket.upper + 1e-12 ||
        re.bracket.lower > rp.bracket.upper + slack)
      ++delta_misses;
  }
  report(4, misses == 0 && delta_misses == 0,
         "oracle equivalence: 1000 bracket/oracle containments (" + std::to_string(misses) +
             " miss), 100 pruned-vs-exhaustive sets (" + std::to_string(delta_misses) + " miss)");
}

void criterion5(const CliRunner& cli, const std::string& fixtures) {
  bool ok = true;
  std::string detail;

  // rank-one equality witness for the two-set mean chain
  NonNegMatrix a{{1, 1}, {1, 1}};
  ChainInputs in;
  in.sets.push_back(MatrixSet({a}, "P"));
  in.sets.push_back(MatrixSet({a}, "S"));
  EvalOptions opt;
  auto rep = evaluate_chain(chain_by_id("C13"), in, ChainParams{}, opt);
  const auto& b = rep.branches[0];
  double l0 = 1, u0 = 1, l1 = 1, u1 = 1;
  for (const auto& f : b.terms[0]) {
    l0 *= std::pow(f.bracket.lower, f.exponent);
    u0 *= std::pow(f.bracket.upper, f.exponent);
  }
  for (const auto& f : b.terms[1]) {
    l1 *= std::pow(f.bracket.lower, f.exponent);
    u1 *= std::pow(f.bracket.upper, f.exponent);
  }
  if (!(u0 - l0 <= 1e-8 * u0 && u1 - l1 <= 1e-8 * u1 && l0 <= u1 * (1 + 1e-12) &&
        l1 <= u0 * (1 + 1e-12))) {
    ok = false;
    detail += " rank-one equality failed;";
  }

  // two nilpotent shifts: exact [2,2] at depth 2
  MatrixSet shifts({NonNegMatrix{{0, 2}, {0, 0}}, NonNegMatrix{{0, 0}, {2, 0}}});
  EnumerationBudget b2;
  b2.max_depth = 2;
  const auto r = radius_bracket(shifts, b2);
  if (!(std::abs(r.lower - 2.0) <= 1e-12 && std::abs(r.upper - 2.0) <= 1e-12)) {
    ok = false;
    detail += " two-shift bracket not [2,2];";
  }

  // curated fixture files for all nineteen chains
  int fixture_fails = 0;
  for (int i = 1; i <= 19; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "c%02d.json", i);
    const int rc = cli.run("verify --input " + fixtures + "/" + name, std::string("fix_") + name);
    if (rc != 0) ++fixture_fails;
  }
  if (fixture_fails > 0) {
    ok = false;
    detail += " " + std::to_string(fixture_fails) + " fixture checks failed;";
  }
  report(5, ok, "tightness witnesses and 19 curated fixtures" + detail);
}

void criterion6(const CliRunner& cli) {
  const std::string csv = cli.tmp_dir + "/kernel_residuals.csv";
  const int rc = cli.run("kernel --grids 16,32,64 --csv " + csv + " --out " + cli.tmp_dir +
                             "/kernel.json",
                         "criterion6");
  bool ok = rc == 0;
  std::string detail = "kernel refinement C7..C10 on 5 kernels, grids 16/32/64: exit " +
                       std::to_string(rc);
  if (ok) {
    const std::string body = slurp(csv);
    long lines = 0;
    for (char c : body) lines += c == '\n';
    if (lines < 10) {
      ok = false;
      detail += ", residual table too small";
    }
    // verdicts must hold at every grid: the report must contain no flip
    const std::string rep = slurp(cli.tmp_dir + "/kernel.json");
    if (rep.find("\"violation\"") != std::string::npos ||
        rep.find("inconclusive") != std::string::npos) {
      ok = false;
      detail += ", verdict flip in report";
    }
  }
  report(6, ok, detail);
}

void criterion7(const CliRunner& cli) {
  bool ok = true;
  std::string detail;

  const std::string a = cli.tmp_dir + "/workers1.json";
  const std::string b = cli.tmp_dir + "/workers4.json";
  int rc1 = cli.run("verify --random 11 10 --dims 2..4 --sizes 1..3 --depth 5 --workers 1 --out " +
                        a,
                    "criterion7a");
  int rc2 = cli.run("verify --random 11 10 --dims 2..4 --sizes 1..3 --depth 5 --workers 4 --out " +
                        b,
                    "criterion7b");
  if (rc1 != 0 || rc2 != 0) {
    ok = false;
    detail += " verify runs failed;";
  } else {
    auto ja = nlohmann::ordered_json::parse(slurp(a));
    auto jb = nlohmann::ordered_json::parse(slurp(b));
    ja.erase("timings");
    jb.erase("timings");
    if (ja.dump() != jb.dump()) {
      ok = false;
      detail += " 1-vs-4 worker reports differ;";
    }
  }

  const std::string bench = cli.tmp_dir + "/bench.json";
  const int rc3 =
      cli.run("bench --sizes 2..2 --dims 4..4 --depth 10 --random 42 1 --out " + bench,
              "criterion7c");
  if (rc3 != 0) {
    ok = false;
    detail += " bench run failed;";
  } else {
    auto jb = nlohmann::ordered_json::parse(slurp(bench));
    const double ratio = jb["bench"]["ratio"].get<double>();
    const bool agree = jb["bench"]["brackets_agree"].get<bool>();
    char buf[96];
    std::snprintf(buf, sizeof buf, " bench pruned/exhaustive ratio %.3f", ratio);
    detail += buf;
    if (!(ratio < 0.60) || !agree) ok = false;
  }
  report(7, ok, "determinism and pruning performance:" + detail);
}

}  // namespace

int main(int argc, char** argv) {
  CliRunner cli;
  cli.cli_path = "./hjsr";
  std::string fixtures = "tests/fixtures";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) cli.cli_path = argv[++i];
    if (arg == "--fixtures" && i + 1 < argc) fixtures = argv[++i];
  }
  cli.tmp_dir = "acceptance_tmp";
  if (std::system(("mkdir -p " + cli.tmp_dir).c_str()) != 0) {
    std::fprintf(stderr, "cannot create %s\n", cli.tmp_dir.c_str());
    return 1;
  }

  criterion1(cli);
  criterion2();
  criterion3();
  criterion4();
  criterion5(cli, fixtures);
  criterion6(cli);
  criterion7(cli);

  std::printf("%s (%d criterion failures)\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
