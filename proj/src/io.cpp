#include "hjsr/io.hpp"

#include <fstream>
#include <sstream>

namespace hjsr {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

NonNegMatrix matrix_from_rows(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) fail(where, "rows must be a nonempty array of arrays");
  const int n = static_cast<int>(rows.size());
  std::vector<double> entries;
  entries.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const auto& r = rows[i];
    if (!r.is_array() || static_cast<int>(r.size()) != n)
      fail(where, "row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j) {
      if (!r[j].is_number())
        fail(where, "row " + std::to_string(i) + " col " + std::to_string(j) + " is not a number");
      const double v = r[j].get<double>();
      if (!(v >= 0.0) || !std::isfinite(v))
        fail(where, "row " + std::to_string(i) + " col " + std::to_string(j) +
                        " is negative or not finite (" + std::to_string(v) + ")");
      entries.push_back(v);
    }
  }
  return NonNegMatrix(n, std::move(entries));
}

KernelSpec kernel_from_json(const json& e, const std::string& where) {
  const std::string kind = e.value("kernel", "");
  if (kind == "constant") return KernelSpec::constant(e.value("c", 1.0));
  if (kind == "exp_abs") return KernelSpec::exp_abs(e.value("scale", 1.0));
  if (kind == "gaussian") return KernelSpec::gaussian(e.value("scale", 1.0));
  if (kind == "separable") {
    std::vector<double> f = e.value("f", std::vector<double>{1.0});
    std::vector<double> g = e.value("g", std::vector<double>{1.0});
    return KernelSpec::separable(std::move(f), std::move(g));
  }
  if (kind == "piecewise_constant") {
    const int blocks = e.value("blocks", 0);
    if (e.contains("values")) {
      std::vector<double> vals = e["values"].get<std::vector<double>>();
      return KernelSpec::piecewise_table(blocks, std::move(vals));
    }
    return KernelSpec::piecewise_random(e.value("seed", std::uint64_t{0}), blocks);
  }
  fail(where, "unknown kernel kind '" + kind + "'");
}

}  // namespace

const MatrixSet& InputDocument::set_or_singleton(const std::string& name) const {
  auto s = sets.find(name);
  if (s != sets.end()) return s->second;
  throw ParseError("no matrix_set entry named '" + name + "'");
}

InputDocument parse_input(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("input is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("input root must be an object");
  InputDocument out;
  out.version = doc.value("version", 0);
  if (out.version != 1) throw ParseError("unsupported input version (expected 1)");

  for (const auto& e : doc.value("entries", json::array())) {
    const std::string name = e.value("name", "");
    const std::string kind = e.value("kind", "");
    const std::string where = "entry '" + name + "'";
    if (name.empty()) fail(where, "missing name");
    if (out.matrices.count(name) || out.sets.count(name) || out.kernels.count(name) ||
        out.weight_vectors.count(name))
      fail(where, "duplicate entry name");
    try {
      if (kind == "matrix") {
        out.matrices.emplace(name, matrix_from_rows(e.at("rows"), where));
        out.sets.emplace(name,
                         MatrixSet({out.matrices.at(name)}, name));  // usable where a set is asked
      } else if (kind == "matrix_set") {
        std::vector<NonNegMatrix> members;
        if (e.contains("members")) {
          for (const auto& mn : e["members"]) {
            const std::string ref = mn.get<std::string>();
            auto it = out.matrices.find(ref);
            if (it == out.matrices.end())
              fail(where, "member '" + ref + "' does not name a previously defined matrix");
            members.push_back(it->second);
          }
        } else if (e.contains("rows_list")) {
          for (const auto& rows : e["rows_list"]) members.push_back(matrix_from_rows(rows, where));
        }
        if (members.empty()) fail(where, "matrix_set needs 'members' or 'rows_list'");
        out.sets.emplace(name, MatrixSet(std::move(members), name));
      } else if (kind == "kernel_spec") {
        out.kernels.emplace(name, kernel_from_json(e, where));
      } else if (kind == "weights") {
        std::vector<double> vals = e.at("values").get<std::vector<double>>();
        const std::string mode = e.value("mode", "strict");
        out.weight_vectors.emplace(
            name, WeightVector(std::move(vals), mode == "relaxed"
                                                    ? WeightVector::Mode::relaxed_sum_ge_one
                                                    : WeightVector::Mode::strict_sum_one));
      } else {
        fail(where, "unknown kind '" + kind + "'");
      }
    } catch (const DomainError& err) {
      fail(where, err.what());
    } catch (const DimensionError& err) {
      fail(where, err.what());
    } catch (const json::exception& err) {
      fail(where, err.what());
    }
    out.entry_order.push_back(name);
  }

  for (const auto& c : doc.value("checks", json::array())) {
    CheckSpec cs;
    cs.chain = c.value("chain", "");
    if (cs.chain.empty()) throw ParseError("check without 'chain' id");
    for (const auto& op : c.value("operands", json::array())) cs.operands.push_back(op);
    cs.weights_name = c.value("weights", "");
    cs.alpha = c.value("alpha", 0.5);
    cs.k = c.value("k", 2);
    if (c.contains("expect_terms")) cs.expect_terms = c["expect_terms"].get<std::vector<double>>();
    const std::string where = "check " + cs.chain;
    if (cs.operands.empty()) fail(where, "needs at least one operand name");
    for (const auto& op : cs.operands)
      if (!out.sets.count(op)) fail(where, "operand '" + op + "' is not a matrix/matrix_set entry");
    if (!cs.weights_name.empty() && !out.weight_vectors.count(cs.weights_name))
      fail(where, "weights '" + cs.weights_name + "' is not a weights entry");
    out.checks.push_back(std::move(cs));
  }

  if (doc.contains("campaign")) {
    const auto& c = doc["campaign"];
    CampaignSpec cs;
    cs.seed = c.value("seed", std::uint64_t{42});
    cs.trials = c.value("trials", 1);
    if (c.contains("dims")) {
      cs.dim_lo = c["dims"].at(0).get<int>();
      cs.dim_hi = c["dims"].at(1).get<int>();
    }
    if (c.contains("set_sizes")) {
      cs.size_lo = c["set_sizes"].at(0).get<int>();
      cs.size_hi = c["set_sizes"].at(1).get<int>();
    }
    cs.depth = c.value("depth", 6);
    cs.pruning = c.value("pruning", "gripenberg");
    cs.tol = c.value("tol", 1e-9);
    for (const auto& id : c.value("chains", json::array())) cs.chains.push_back(id);
    out.campaign = std::move(cs);
  }
  return out;
}

InputDocument parse_input_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_input(ss.str());
}

std::string serialize_input(const InputDocument& doc) {
  ordered_json j;
  j["version"] = doc.version;
  j["entries"] = ordered_json::array();
  for (const auto& name : doc.entry_order) {
    ordered_json e;
    e["name"] = name;
    if (doc.matrices.count(name)) {
      const auto& m = doc.matrices.at(name);
      e["kind"] = "matrix";
      ordered_json rows = ordered_json::array();
      for (int i = 0; i < m.dim(); ++i) {
        ordered_json row = ordered_json::array();
        for (int jx = 0; jx < m.dim(); ++jx) row.push_back(m(i, jx));
        rows.push_back(row);
      }
      e["rows"] = rows;
    } else if (doc.sets.count(name)) {
      const auto& s = doc.sets.at(name);
      e["kind"] = "matrix_set";
      ordered_json ml = ordered_json::array();
      for (const auto& m : s.members) {
        ordered_json rows = ordered_json::array();
        for (int i = 0; i < m.dim(); ++i) {
          ordered_json row = ordered_json::array();
          for (int jx = 0; jx < m.dim(); ++jx) row.push_back(m(i, jx));
          rows.push_back(row);
        }
        ml.push_back(rows);
      }
      e["rows_list"] = ml;
    } else if (doc.kernels.count(name)) {
      const auto& k = doc.kernels.at(name);
      e["kind"] = "kernel_spec";
      switch (k.kind) {
        case KernelSpec::Kind::constant:
          e["kernel"] = "constant";
          e["c"] = k.value;
          break;
        case KernelSpec::Kind::exp_abs:
          e["kernel"] = "exp_abs";
          e["scale"] = k.scale;
          break;
        case KernelSpec::Kind::gaussian:
          e["kernel"] = "gaussian";
          e["scale"] = k.scale;
          break;
        case KernelSpec::Kind::separable:
          e["kernel"] = "separable";
          e["f"] = k.f_coeffs;
          e["g"] = k.g_coeffs;
          break;
        case KernelSpec::Kind::piecewise_constant:
          e["kernel"] = "piecewise_constant";
          e["blocks"] = k.blocks;
          e["values"] = k.cell_values;
          break;
      }
    } else if (doc.weight_vectors.count(name)) {
      const auto& w = doc.weight_vectors.at(name);
      e["kind"] = "weights";
      e["values"] = w.weights();
      e["mode"] = w.mode() == WeightVector::Mode::strict_sum_one ? "strict" : "relaxed";
    }
    j["entries"].push_back(e);
  }
  if (!doc.checks.empty()) {
    j["checks"] = ordered_json::array();
    for (const auto& c : doc.checks) {
      ordered_json e;
      e["chain"] = c.chain;
      e["operands"] = c.operands;
      if (!c.weights_name.empty()) e["weights"] = c.weights_name;
      e["alpha"] = c.alpha;
      e["k"] = c.k;
      if (!c.expect_terms.empty()) e["expect_terms"] = c.expect_terms;
      j["checks"].push_back(e);
    }
  }
  if (doc.campaign) {
    const auto& c = *doc.campaign;
    ordered_json e;
    e["seed"] = c.seed;
    e["trials"] = c.trials;
    e["dims"] = {c.dim_lo, c.dim_hi};
    e["set_sizes"] = {c.size_lo, c.size_hi};
    e["depth"] = c.depth;
    e["pruning"] = c.pruning;
    e["tol"] = c.tol;
    e["chains"] = c.chains;
    j["campaign"] = e;
  }
  return j.dump(2) + "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

ordered_json bracket_to_json(const RadiusBracket& b) {
  ordered_json j;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["lower_depth"] = b.lower_depth;
  j["upper_depth"] = b.upper_depth;
  j["method"] = b.method;
  j["converged"] = b.converged;
  return j;
}

ordered_json chain_report_to_json(const ChainReport& r) {
  ordered_json j;
  j["chain"] = r.chain_id;
  j["digest"] = r.input_digest;
  j["exact"] = r.exact_mode;
  j["dim"] = r.dim;
  j["overall"] = r.overall;
  j["branches"] = ordered_json::array();
  for (const auto& b : r.branches) {
    ordered_json bj;
    bj["terms"] = ordered_json::array();
    for (const auto& t : b.terms) {
      ordered_json tj = ordered_json::array();
      for (const auto& f : t) {
        ordered_json fj;
        fj["expr"] = f.expr;
        fj["exponent"] = f.exponent;
        fj["bracket"] = bracket_to_json(f.bracket);
        fj["set_size"] = f.set_size;
        if (f.capped_bounds) fj["capped_bounds"] = true;
        tj.push_back(fj);
      }
      bj["terms"].push_back(tj);
    }
    bj["pairs"] = ordered_json::array();
    for (const auto& p : b.pairs) {
      ordered_json pj;
      pj["left"] = p.left_term;
      pj["right"] = p.right_term;
      pj["left_lower"] = p.left_value;
      pj["right_upper"] = p.right_value;
      pj["verdict"] = p.verdict;
      bj["pairs"].push_back(pj);
    }
    j["branches"].push_back(bj);
  }
  if (!r.counterexample.empty()) j["counterexample"] = r.counterexample;
  return j;
}

ordered_json make_report_document(const std::string& input_digest) {
  ordered_json j;
  j["tool"] = "hjsr";
  j["tool_version"] = "1.0.0";
  j["input_digest"] = input_digest;
  return j;
}

}  // namespace hjsr
