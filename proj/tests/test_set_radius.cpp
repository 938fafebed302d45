#include <doctest.h>

#include <cmath>

#include "hjsr/matrix_set.hpp"
#include "hjsr/rng.hpp"

using namespace hjsr;

namespace {

const NonNegMatrix kUp{{0, 2}, {0, 0}};
const NonNegMatrix kDown{{0, 0}, {2, 0}};

MatrixSet shifts() { return MatrixSet({kUp, kDown}, "shifts"); }

MatrixSet random_set(Rng& rng, int dim, int size, double zero_prob = 0.3) {
  std::vector<NonNegMatrix> ms;
  for (int s = 0; s < size; ++s) {
    std::vector<double> e(static_cast<size_t>(dim) * dim, 0.0);
    for (auto& v : e) {
      const double gate = rng.uniform01();
      const double val = rng.uniform01();
      if (gate >= zero_prob) v = val;
    }
    ms.emplace_back(dim, std::move(e));
  }
  return MatrixSet(std::move(ms));
}

}  // namespace

TEST_CASE("set_power counting and singleton") {
  NonNegMatrix a{{1, 1}, {0, 1}};
  MatrixSet s({a});
  MatrixSet s3 = set_power(s, 3);
  CHECK(s3.size() == 1);
  CHECK(s3.members[0] == mat_product(a, mat_product(a, a)));

  MatrixSet two = shifts();
  CHECK(set_power(two, 3).size() == 8);
  CHECK(set_power(two, 1).members == two.members);
  CHECK_THROWS_AS(set_power(two, 30), BudgetError);
}

TEST_CASE("set_product counting") {
  MatrixSet a({kUp}), b({kDown});
  MatrixSet ab = set_product(a, b);
  CHECK(ab.size() == 1);
  CHECK(ab.members[0] == mat_product(kUp, kDown));

  MatrixSet two = shifts();
  CHECK(set_product(two, b).size() == 2);
  MatrixSet three({kUp, kDown, NonNegMatrix::identity(2)});
  CHECK(set_product(two, three).size() == 6);
  CHECK_THROWS_AS(set_product(two, MatrixSet({NonNegMatrix(3)})), DimensionError);
}

TEST_CASE("hadamard_mean_of_sets counting and identities") {
  MatrixSet a({kUp}), b({NonNegMatrix::ones(2)});
  auto m = hadamard_mean_of_sets({a, b}, WeightVector::uniform(2));
  CHECK(m.size() == 1);
  CHECK(m.members[0] == hadamard_power(kUp, 0.5));

  Rng rng(5);
  MatrixSet s2 = random_set(rng, 3, 2), s3 = random_set(rng, 3, 3);
  CHECK(hadamard_mean_of_sets({s2, s3}, WeightVector::uniform(2)).size() == 6);

  MatrixSet js({NonNegMatrix::ones(2)});
  auto jm = hadamard_mean_of_sets({js, js, js}, WeightVector::uniform(3));
  CHECK(jm.size() == 1);
  CHECK(jm.members[0] == NonNegMatrix::ones(2));
}

TEST_CASE("gsr_lower and jsr_upper on the two-shift set") {
  MatrixSet s = shifts();
  CHECK(gsr_lower(s, 1) == 0.0);  // both members nilpotent
  CHECK(gsr_lower(s, 2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(jsr_upper(s, 1) == doctest::Approx(2.0));

  MatrixSet id({NonNegMatrix::identity(3)});
  CHECK(jsr_upper(id, 1) == doctest::Approx(1.0));
  CHECK(jsr_upper(id, 5) == doctest::Approx(1.0));
  CHECK(gsr_lower(id, 4) == doctest::Approx(1.0));

  // homogeneity of the norm-side bound
  std::vector<double> scaled(kUp.entries());
  for (auto& v : scaled) v *= 3.0;
  MatrixSet s3({NonNegMatrix(2, scaled), kDown});
  CHECK(jsr_upper(s3, 1) == doctest::Approx(3.0 * 2.0));
}

TEST_CASE("radius_bracket: tight two-shift bracket at depth 2") {
  EnumerationBudget b;
  b.max_depth = 2;
  auto r = radius_bracket_detailed(shifts(), b);
  CHECK(r.bracket.lower == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.bracket.upper == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.products_evaluated == 6);
  CHECK(r.lower_word == std::vector<int>{0, 1});  // AB, the lexicographically first witness
}

TEST_CASE("radius_bracket: zero set and singleton convergence") {
  EnumerationBudget b;
  auto z = radius_bracket(MatrixSet({NonNegMatrix(2)}), b);
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);

  Rng rng(88);
  MatrixSet pos = random_set(rng, 4, 1, 0.0);  // strictly positive singleton
  EnumerationBudget b8;
  b8.max_depth = 8;
  auto r = radius_bracket(pos, b8);
  CHECK(r.lower <= r.upper);
  CHECK(r.width() <= 0.05 * r.upper);
}

TEST_CASE("radius_bracket consistency across depths") {
  Rng rng(1001);
  for (int t = 0; t < 25; ++t) {
    MatrixSet s = random_set(rng, static_cast<int>(rng.uniform_int(2, 4)),
                             static_cast<int>(rng.uniform_int(1, 3)));
    for (int m = 1; m <= 4; ++m)
      for (int mp = 1; mp <= 4; ++mp) CHECK(gsr_lower(s, m) <= jsr_upper(s, mp) + 1e-9);
  }
}

TEST_CASE("power identity in bracket form") {
  Rng rng(321);
  for (int t = 0; t < 15; ++t) {
    MatrixSet s = random_set(rng, 3, 2);
    for (int k = 2; k <= 3; ++k) {
      MatrixSet sk = set_power(s, k);
      for (int m = 1; m <= 2; ++m)
        for (int j = 1; j <= 3; ++j) {
          CHECK(gsr_lower(sk, m) <= std::pow(jsr_upper(s, j), k) * (1 + 1e-9) + 1e-12);
          CHECK(std::pow(gsr_lower(s, j), k) <= jsr_upper(sk, m) * (1 + 1e-9) + 1e-12);
        }
    }
  }
}

TEST_CASE("commutation: brackets of PS and SP overlap") {
  Rng rng(555);
  EnumerationBudget b;
  b.max_depth = 4;
  for (int t = 0; t < 15; ++t) {
    const int dim = static_cast<int>(rng.uniform_int(2, 4));
    MatrixSet p = random_set(rng, dim, 2), s = random_set(rng, dim, 2);
    auto ps = radius_bracket(set_product(p, s), b);
    auto sp = radius_bracket(set_product(s, p), b);
    CHECK(ps.lower <= sp.upper + 1e-9);
    CHECK(sp.lower <= ps.upper + 1e-9);
  }
}

TEST_CASE("pruned enumeration matches exhaustive within delta") {
  Rng rng(20240);
  for (int t = 0; t < 60; ++t) {
    MatrixSet s = random_set(rng, static_cast<int>(rng.uniform_int(2, 4)),
                             static_cast<int>(rng.uniform_int(1, 3)));
    EnumerationBudget exact;
    exact.max_depth = 6;
    EnumerationBudget pruned = exact;
    pruned.pruning = PruningMode::gripenberg;
    auto re = radius_bracket_detailed(s, exact);
    auto rp = radius_bracket_detailed(s, pruned);
    const double delta = rp.pruning_delta;
    const double slack = delta + 1e-12 * std::max(1.0, re.bracket.upper);
    // pruning may cost at most delta on either endpoint (it may also tighten
    // the upper bound, which is pure gain)
    CHECK(rp.bracket.lower >= re.bracket.lower - slack);
    CHECK(rp.bracket.upper <= re.bracket.upper + slack);
    // both brackets must enclose the same radius
    CHECK(rp.bracket.lower <= re.bracket.upper + 1e-12);
    CHECK(re.bracket.lower <= rp.bracket.upper + slack);
    CHECK(rp.products_evaluated <= re.products_evaluated + 14);  // seed-pass overhead only
  }
}

TEST_CASE("bracket endpoints are bit-identical across worker counts") {
  Rng rng(808);
  for (int t = 0; t < 10; ++t) {
    MatrixSet s = random_set(rng, 4, 3);
    EnumerationBudget b;
    b.max_depth = 5;
    SUBCASE("") {}
    auto r1 = radius_bracket_detailed(s, b, 1);
    auto r4 = radius_bracket_detailed(s, b, 4);
    CHECK(r1.bracket.lower == r4.bracket.lower);
    CHECK(r1.bracket.upper == r4.bracket.upper);
    CHECK(r1.lower_word == r4.lower_word);
    CHECK(r1.products_evaluated == r4.products_evaluated);

    EnumerationBudget g = b;
    g.pruning = PruningMode::gripenberg;
    auto p1 = radius_bracket_detailed(s, g, 1);
    auto p4 = radius_bracket_detailed(s, g, 4);
    CHECK(p1.bracket.lower == p4.bracket.lower);
    CHECK(p1.bracket.upper == p4.bracket.upper);
    CHECK(p1.lower_word == p4.lower_word);
    CHECK(p1.products_evaluated == p4.products_evaluated);
  }
}

TEST_CASE("budget capping is flagged, not fabricated") {
  Rng rng(3999);
  MatrixSet s = random_set(rng, 3, 3, 0.0);
  EnumerationBudget b;
  b.max_depth = 12;
  b.max_products = 100;  // forces a shallow effective depth
  auto r = radius_bracket_detailed(s, b);
  CHECK(r.budget_capped);
  CHECK(r.effective_depth < 12);
  CHECK_FALSE(r.bracket.converged);
  CHECK(r.bracket.lower <= r.bracket.upper);

  b.max_products = 1;  // below |members|
  CHECK_THROWS_AS(radius_bracket_detailed(s, b), BudgetError);
}

TEST_CASE("dedup keeps endpoints") {
  // a set with duplicate members: dedup gives identical bounds
  MatrixSet s({kUp, kUp, kDown});
  EnumerationBudget plain;
  plain.max_depth = 4;
  EnumerationBudget dd = plain;
  dd.dedup = true;
  auto r = radius_bracket_detailed(s, plain);
  auto d = radius_bracket_detailed(s, dd);
  CHECK(r.bracket.lower == d.bracket.lower);
  CHECK(r.bracket.upper == d.bracket.upper);
  CHECK(d.products_evaluated < r.products_evaluated);
}
