#include "cmnet/classical.hpp"
#include "cmnet/errors.hpp"
#include "cmnet/quantum.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace cmnet;
using cmnet::testing::fig1_block_oracle;
using cmnet::testing::random_unitary;

namespace {

const Network kFig1 = make_fig1_network();

QuantumModel fig1_model(const ComplexMatrix& u) {
  QuantumModel m = QuantumModel::cm(kFig1, TupleSet::fig1());
  m.set_all_refinements(u);
  return m;
}

OutcomeTuple refined(int i, int j, int k, int l) {
  return {Outcome::refined(i), Outcome::refined(j), Outcome::refined(k), Outcome::refined(l)};
}

}  // namespace

TEST_CASE("CM source states") {
  const double s3 = 1.0 / std::sqrt(3.0);
  const SourceState two = cm_source_state(2, 3);
  REQUIRE(two.amplitudes.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(two.amplitudes[i] - Complex(i % 4 == 0 ? s3 : 0.0)) < 1e-15);
  const SourceState three = cm_source_state(3, 3);
  REQUIRE(three.amplitudes.size() == 27);
  for (std::size_t i = 0; i < 27; ++i) CHECK(std::abs(three.amplitudes[i] - Complex(i % 13 == 0 ? s3 : 0.0)) < 1e-15);
  const SourceState qubit = cm_source_state(2, 2);
  CHECK(std::abs(qubit.amplitudes[0] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(qubit.amplitudes[3] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(qubit.amplitudes[1]) == 0.0);

  SourceState bad = qubit;
  bad.amplitudes[0] *= 2.0;
  CHECK_THROWS_AS(check_source_state(bad), PreconditionError);
}

TEST_CASE("identity refinement measurement of A") {
  const Measurement m = build_cm_measurement(kFig1, "A", TupleSet::fig1(), RefinementUnitary{"A", identity_matrix(3)});
  CHECK(m.dimension == 9);
  REQUIRE(m.elements.size() == 9);
  check_measurement(m);
  const std::size_t expected[3] = {1, 5, 6};  // |01>, |12>, |20>
  for (int r = 1; r <= 3; ++r) {
    const auto& e = m.elements[6 + r - 1];
    CHECK(e.label == Outcome::refined(r));
    REQUIRE(e.basis.size() == 1);
    for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(e.basis[0][k]) == (k == expected[r - 1] ? 1.0 : 0.0));
  }
}

TEST_CASE("coarse measurement of A") {
  const Measurement m = build_cm_measurement(kFig1, "A", TupleSet::fig1(), std::nullopt);
  REQUIRE(m.elements.size() == 7);
  CHECK(m.elements.back().label == Outcome::ambiguous());
  CHECK(m.elements.back().basis.size() == 3);
  for (std::size_t i = 0; i < 6; ++i) CHECK(m.elements[i].basis.size() == 1);
  check_measurement(m);
}

TEST_CASE("generic refinement measurement is complete") {
  PortableRng rng(7);
  const Measurement m =
      build_cm_measurement(kFig1, "B", TupleSet::fig1(), RefinementUnitary{"B", random_unitary(rng)});
  check_measurement(m);
}

TEST_CASE("refinement preconditions") {
  ComplexMatrix u = identity_matrix(3);
  u[0][0] = 2.0;
  CHECK_THROWS_AS(build_cm_measurement(kFig1, "A", TupleSet::fig1(), RefinementUnitary{"A", u}), PreconditionError);
  CHECK_THROWS_AS(build_cm_measurement(kFig1, "A", TupleSet::fig1(), RefinementUnitary{"A", identity_matrix(2)}),
                  PreconditionError);
}

TEST_CASE("global state dimension") {
  std::vector<SourceState> sources;
  for (const auto& s : kFig1.sources) sources.push_back(cm_source_state(s.legs.size(), 3));
  CHECK(build_global_state(kFig1, sources).amplitudes.size() == 6561);

  Network pair;
  pair.colors = 2;
  pair.sources = {{"S", {"A", "B"}}};
  pair.parties = {{"A", {"S"}}, {"B", {"S"}}};
  const GlobalState g = build_global_state(pair, {cm_source_state(2, 2)});
  REQUIRE(g.amplitudes.size() == 4);
  CHECK(std::abs(g.amplitudes[0] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(g.amplitudes[3] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK_THROWS_AS(build_global_state(kFig1, sources, 6560), CapExceededError);
}

TEST_CASE("wiring of D reads nu then lambda") {
  const Wiring w = make_wiring(kFig1);
  CHECK(w.legs == 8);
  CHECK(w.view_legs[3] == std::vector<std::size_t>{7, 1});

  // lambda = |2>_A |0>_D, mu = |000>, nu = |111>: D must see (1, 0), i.e. "10".
  QuantumModel m = QuantumModel::cm(kFig1, TupleSet::fig1());
  for (auto& s : m.sources) {
    std::fill(s.amplitudes.begin(), s.amplitudes.end(), Complex(0.0));
    s.uniform_superposition = false;
  }
  m.sources[0].amplitudes[6] = 1.0;
  m.sources[1].amplitudes[0] = 1.0;
  m.sources[2].amplitudes[13] = 1.0;
  const Distribution d = simulate(m);
  CHECK(marginal(d, {"D"}).probability({Outcome::view({1, 0})}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(marginal(d, {"A"}).probability({Outcome::ambiguous()}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("all-coarse quantum distribution equals P_color") {
  const Distribution pc = to_float(compute_pcolor(kFig1, TupleSet::fig1()));
  CHECK(tv_distance(simulate(QuantumModel::cm(kFig1, TupleSet::fig1())), pc) < 1e-10);
}

TEST_CASE("identity refinement equals the refined classical enumeration") {
  const TupleSet t = TupleSet::fig1();
  const CmStrategy s(kFig1, t);
  std::map<OutcomeTuple, double> table;
  for (std::uint64_t i = 0; i < 27; ++i) {
    const ColorAssignment a = s.assignment(i);
    OutcomeTuple o = classical_outcome(s, a);
    for (std::size_t p = 0; p < 4; ++p) {
      if (!o[p].is_ambiguous()) continue;
      const auto& amb = s.ambiguous_views(p);
      const auto pos = std::find(amb.begin(), amb.end(), s.view_index_of(p, a)) - amb.begin();
      o[p] = Outcome::refined(static_cast<int>(pos) + 1);
    }
    table[o] += 1.0 / 27.0;
  }
  const Distribution oracle(kFig1.party_names(), table);
  CHECK(tv_distance(simulate(fig1_model(identity_matrix(3))), oracle) < 1e-12);
}

TEST_CASE("Born engine matches the closed-form block amplitude") {
  PortableRng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    std::array<ComplexMatrix, 4> u;
    QuantumModel m = QuantumModel::cm(kFig1, TupleSet::fig1());
    for (int x = 0; x < 4; ++x) {
      u[x] = random_unitary(rng);
      m.set_refinement({kFig1.parties[x].name, u[x]});
    }
    const Distribution d = simulate(m);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            worst = std::max(worst, std::abs(d.probability(refined(i + 1, j + 1, k + 1, l + 1)) -
                                             fig1_block_oracle(u, {i, j, k, l})));
          }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("single-party marginals are uniform") {
  PortableRng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Distribution d = simulate(fig1_model(random_unitary(rng)));
    CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& p : kFig1.party_names()) {
      const Distribution m = marginal(d, {p});
      CHECK(m.support_size() == 9);
      for (const auto& [o, v] : m.float_table()) CHECK(v == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("coarse-graining removes refinement dependence") {
  PortableRng rng(5);
  const Distribution coarse = simulate(QuantumModel::cm(kFig1, TupleSet::fig1()));
  for (int trial = 0; trial < 20; ++trial) {
    QuantumModel m = QuantumModel::cm(kFig1, TupleSet::fig1());
    for (const auto& p : kFig1.parties) m.set_refinement({p.name, random_unitary(rng)});
    CHECK(tv_distance(merge_refinements(simulate(m)), coarse) < 1e-10);
  }
}

TEST_CASE("row phases of a refinement are unobservable") {
  PortableRng rng(9);
  const ComplexMatrix u = random_unitary(rng);
  const Distribution a = simulate(fig1_model(u));
  QuantumModel m = fig1_model(u);
  m.set_refinement({"C", cmnet::testing::with_row_phases(u, {0.3, -1.2, 2.5})});
  CHECK(tv_distance(a, simulate(m)) < 1e-12);
}

TEST_CASE("interval enclosures contain the float probabilities") {
  PortableRng rng(13);
  const QuantumModel m = fig1_model(random_unitary(rng));
  const Distribution d = simulate(m);
  std::vector<OutcomeTuple> wanted;
  for (int i = 1; i <= 3; ++i)
    for (int l = 1; l <= 3; ++l) wanted.push_back(refined(i, 2, 3, l));
  wanted.push_back({Outcome::view({0, 0}), Outcome::view({0, 0}), Outcome::view({0, 0}), Outcome::view({0, 0})});
  const auto enc = enclose_probabilities(m, wanted);
  for (const auto& o : wanted) {
    const Interval& iv = enc.at(o);
    CHECK(iv.lo() <= d.probability(o));
    CHECK(d.probability(o) <= iv.hi());
    CHECK(iv.hi() - iv.lo() < 1e-12);
  }
  // 1/27 exactly for the color match.
  CHECK(enc.at(wanted.back()).lo() <= 1.0 / 27.0);
  CHECK(enc.at(wanted.back()).hi() >= 1.0 / 27.0);
}
