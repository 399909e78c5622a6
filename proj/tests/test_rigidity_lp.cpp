#include "cmnet/errors.hpp"
#include "cmnet/rigidity_lp.hpp"
#include "support.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace cmnet;
using cmnet::testing::kFig1Column;
using cmnet::testing::permutation_matrix;
using cmnet::testing::random_unitary;

namespace {

const Network kFig1 = make_fig1_network();

QuantumModel fig1_model(const std::array<ComplexMatrix, 4>& u) {
  QuantumModel m = QuantumModel::cm(kFig1, TupleSet::fig1());
  for (int x = 0; x < 4; ++x) m.set_refinement({kFig1.parties[x].name, u[x]});
  return m;
}

std::array<ComplexMatrix, 4> same(const ComplexMatrix& u) { return {u, u, u, u}; }

LPInstance toy(double b1, double b2) {
  LPInstance lp;
  lp.num_vars = 1;
  lp.rows.push_back({{{0, 1.0}}, b1, RowTag::kGeneric, exact_rational(b1), {}});
  lp.rows.push_back({{{0, 1.0}}, b2, RowTag::kGeneric, exact_rational(b2), {}});
  return lp;
}

bool witness_valid(const LPInstance& lp, const std::vector<double>& q, double tol) {
  if (q.size() != lp.num_vars) return false;
  for (double x : q) {
    if (x < -1e-12) return false;
  }
  for (const auto& row : lp.rows) {
    double s = 0.0;
    for (const auto& [v, a] : row.terms) s += a * q[v];
    if (std::abs(s - row.rhs) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("revealing completions of A at view 01") {
  const auto events = find_revealing_completions(kFig1, TupleSet::fig1(), "A", {0, 1});
  bool found = false;
  for (const auto& e : events) {
    CHECK(e.completion != ColorAssignment{0, 1, 2});
    CHECK(e.completion[0] == 0);
    CHECK(e.completion[1] == 1);
    if (e.completion == ColorAssignment{0, 1, 0}) {
      found = true;
      CHECK(e.outcomes[1] == Outcome::view({1, 0}));
      CHECK(e.outcomes[2] == Outcome::view({1, 0}));
      CHECK(e.outcomes[3] == Outcome::view({0, 0}));
    }
  }
  CHECK(found);
  CHECK_THROWS_AS(find_revealing_completions(kFig1, TupleSet::fig1(), "A", {0, 2}), PreconditionError);
}

TEST_CASE("revealing completions identify their assignment uniquely") {
  const TupleSet t = TupleSet::fig1();
  const CmStrategy s(kFig1, t);
  for (std::size_t p = 0; p < 4; ++p) {
    for (auto v : s.ambiguous_views(p)) {
      for (const auto& e : find_revealing_completions(kFig1, t, kFig1.parties[p].name, s.view_colors(p, v))) {
        int matches = 0;
        for (std::uint64_t i = 0; i < 27; ++i) {
          OutcomeTuple o = classical_outcome(s, s.assignment(i));
          o[p] = Outcome::ambiguous();
          matches += o == e.outcomes;
        }
        CHECK(matches == 1);
        CHECK(view_of(kFig1, kFig1.parties[p].name, e.completion) == s.view_colors(p, v));
      }
    }
  }
}

TEST_CASE("B and C reveal through each other's marginal") {
  // B and C read the same sources, so C is ambiguous whenever B is.
  const auto events = find_revealing_completions(kFig1, TupleSet::fig1(), "B", {1, 2});
  REQUIRE_FALSE(events.empty());
  for (const auto& e : events) CHECK(e.outcomes[2].is_ambiguous());
  CHECK(events.front().fine_outcomes(1, {3, 3, 3, 3}).size() == 3);
}

TEST_CASE("no revealing event when the only witness is ambiguous too") {
  // Both sources reach A and B only, and B sees exactly what A sees.
  Network net;
  net.colors = 2;
  net.sources = {{"S1", {"A", "B"}}, {"S2", {"A", "B"}}};
  net.parties = {{"A", {"S1", "S2"}}, {"B", {"S1", "S2"}}};
  const TupleSet t = TupleSet::constants(2, 2);
  CHECK(find_revealing_completions(net, t, "A", {0, 1}).empty());
  CHECK(find_revealing_completions(net, t, "B", {1, 0}).empty());
}

TEST_CASE("r-values match |U column|^2") {
  PortableRng rng(21);
  const auto patterns = enumerate_hidden_patterns(kFig1, TupleSet::fig1());
  const auto events = collect_revealing_events(kFig1, TupleSet::fig1(), patterns);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<ComplexMatrix, 4> u;
    for (auto& x : u) x = random_unitary(rng);
    const Distribution d = simulate(fig1_model(u));
    const RValues r = compute_r_values(kFig1, TupleSet::fig1(), d, patterns, events);
    CHECK(r.size() == 36);
    for (std::size_t x = 0; x < 4; ++x) {
      for (std::size_t t = 0; t < 3; ++t) {
        double sum = 0.0;
        for (int i = 1; i <= 3; ++i) {
          const double v = r.at({x, i, t}).value;
          CHECK(std::abs(v - std::norm(u[x][i - 1][kFig1Column[t][x]])) < 1e-10);
          sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("r-values need revealing events") {
  const auto patterns = enumerate_hidden_patterns(kFig1, TupleSet::fig1());
  const Distribution d = simulate(fig1_model(same(identity_matrix(3))));
  CHECK_THROWS_AS(compute_r_values(kFig1, TupleSet::fig1(), d, patterns, {}), PreconditionError);
}

TEST_CASE("LP shape on fig1") {
  PortableRng rng(2);
  const Certification c = certify(fig1_model(same(random_unitary(rng))));
  const LPInstance& lp = c.lp;
  CHECK(lp.num_vars == 243);
  CHECK(lp.count(RowTag::kBlockMarginal) == 81);
  CHECK(lp.count(RowTag::kPartyPattern) == 36);
  CHECK(lp.count(RowTag::kNormalization) == 3);
  double block = 0.0;
  for (const auto& row : lp.rows) {
    CHECK(std::isfinite(row.rhs));
    CHECK(row.rhs >= 0.0);
    CHECK(row.rhs <= 1.0);
    if (row.tag == RowTag::kBlockMarginal) block += row.rhs;
  }
  CHECK(std::abs(block - 1.0 / 9.0) < 1e-12);

  // Party-pattern right-hand sides sum to the normalization value.
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t t = 0; t < 3; ++t) {
      double s = 0.0;
      for (int i = 1; i <= 3; ++i) s += c.r_values.at({x, i, t}).value / 27.0;
      CHECK(std::abs(s - 1.0 / 27.0) < 1e-9);
    }
  }
}

TEST_CASE("identity refinement has the explicit feasible point") {
  const Certification c = certify(fig1_model(same(identity_matrix(3))));
  std::vector<double> q(c.lp.num_vars, 0.0);
  for (std::size_t v = 0; v < c.lp.variables.size(); ++v) {
    const auto& var = c.lp.variables[v];
    bool hit = true;
    for (int x = 0; x < 4; ++x) hit = hit && var.outcome[x].index == kFig1Column[var.pattern][x] + 1;
    if (hit) q[v] = 1.0 / 27.0;
  }
  CHECK(witness_valid(c.lp, q, 1e-12));
  CHECK(c.feasibility.status == FeasibilityResult::Status::kFeasible);
  CHECK(c.feasibility.residual <= 1e-9);
  CHECK(c.verdict() == "inconclusive");
}

TEST_CASE("permutation refinements are feasible") {
  std::array<int, 3> perm = {0, 1, 2};
  do {
    const ComplexMatrix p = cmnet::testing::with_row_phases(permutation_matrix(perm), {0.4, 1.1, -2.0});
    const Certification c = certify(fig1_model(same(p)));
    CHECK(c.feasibility.status == FeasibilityResult::Status::kFeasible);
    CHECK(c.feasibility.residual <= 1e-9);
    CHECK(c.feasibility.margin <= 1e-9);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("toy infeasible LP") {
  const LPInstance lp = toy(1.0, 2.0);
  CHECK(verify_certificate(lp, {{-1.0, 1.0}}, VerifyMode::kExact));
  CHECK(verify_certificate(lp, {{-1.0, 1.0}}, VerifyMode::kInterval));
  CHECK_FALSE(verify_certificate(lp, {{1.0, -1.0}}, VerifyMode::kExact));
  CHECK_FALSE(verify_certificate(lp, {{0.0, 0.0}}, VerifyMode::kExact));
  CHECK_THROWS_AS(verify_certificate(lp, {{1.0}}, VerifyMode::kExact), PreconditionError);

  const FeasibilityResult r = solve_feasibility(lp);
  CHECK(r.status == FeasibilityResult::Status::kInfeasible);
  CHECK(r.verified_by == VerifyMode::kExact);
  CHECK(r.margin == doctest::Approx(0.5));
  REQUIRE(r.certificate.has_value());
  CHECK(verify_certificate(lp, *r.certificate, VerifyMode::kExact));
  CHECK_FALSE(witness_valid(lp, r.witness, 1e-9));
}

TEST_CASE("toy feasible LP") {
  const FeasibilityResult r = solve_feasibility(toy(1.5, 1.5));
  CHECK(r.status == FeasibilityResult::Status::kFeasible);
  CHECK(r.witness.size() == 1);
  CHECK(r.witness[0] == doctest::Approx(1.5));
  CHECK_FALSE(r.certificate.has_value());
}

TEST_CASE("witness and certificate never coexist") {
  PortableRng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Certification c = certify(fig1_model(same(random_unitary(rng))));
    const auto& f = c.feasibility;
    const bool witness = witness_valid(c.lp, f.witness, kDefaultLpTolerance);
    const bool cert = f.certificate && verify_certificate(c.lp, *f.certificate, VerifyMode::kInterval);
    CHECK_FALSE((witness && cert));
    if (f.status == FeasibilityResult::Status::kFeasible) CHECK(witness);
    if (f.status == FeasibilityResult::Status::kInfeasible) {
      CHECK(cert);
      CHECK(f.margin > kDefaultLpTolerance);
    }
  }
}

TEST_CASE("margin is invariant under row phases") {
  PortableRng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const ComplexMatrix u = random_unitary(rng);
    const double a = certify(fig1_model(same(u))).feasibility.margin;
    std::array<ComplexMatrix, 4> v = same(u);
    v[1] = cmnet::testing::with_row_phases(u, {1.0, 2.0, 3.0});
    v[3] = cmnet::testing::with_row_phases(u, {-0.5, 0.25, 1.5});
    const double b = certify(fig1_model(v)).feasibility.margin;
    CHECK(std::abs(a - b) < 1e-9);
  }
}

TEST_CASE("tampered certificate fails verification") {
  // A certified instance; scale one multiplier until y.A <= 0 breaks.
  PortableRng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Certification c = certify(fig1_model(same(random_unitary(rng))));
    if (c.feasibility.status != FeasibilityResult::Status::kInfeasible) continue;
    CHECK(c.feasibility.verified_by == VerifyMode::kInterval);
    FarkasCertificate y = *c.feasibility.certificate;
    for (auto& v : y.y) v = -v;
    CHECK_FALSE(verify_certificate(c.lp, y, VerifyMode::kInterval));
    CHECK_THROWS_AS(verify_certificate(c.lp, y, VerifyMode::kExact), PreconditionError);
    return;
  }
  FAIL("no certified instance among 200 draws");
}
