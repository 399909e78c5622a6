#include "cmnet/classical.hpp"
#include "cmnet/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace cmnet;

namespace {

const Network kFig1 = make_fig1_network();

OutcomeTuple tuple(std::initializer_list<const char*> parts) {
  OutcomeTuple t;
  for (const char* p : parts) t.push_back(Outcome::parse(p));
  return t;
}

// Brute-force CM outcome without CmStrategy: scan the tuple list directly.
OutcomeTuple oracle_outcome(const Network& net, const std::vector<ColorAssignment>& tuples,
                            const ColorAssignment& a) {
  OutcomeTuple out;
  for (const auto& party : net.parties) {
    std::vector<std::size_t> idx;
    for (const auto& s : party.view) idx.push_back(*net.find_source(s));
    std::vector<int> view;
    for (auto s : idx) view.push_back(a[s]);
    const bool ok = std::any_of(tuples.begin(), tuples.end(), [&](const ColorAssignment& t) {
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (t[idx[k]] != view[k]) return false;
      }
      return true;
    });
    out.push_back(ok ? Outcome::view(view) : Outcome::ambiguous());
  }
  return out;
}

std::vector<ColorAssignment> all_assignments(std::size_t m, int c) {
  std::vector<ColorAssignment> out;
  ColorAssignment a(m, 0);
  for (;;) {
    out.push_back(a);
    std::size_t k = m;
    while (k-- > 0) {
      if (++a[k] < c) break;
      a[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) return out;
  }
}

}  // namespace

TEST_CASE("tuple sets") {
  const TupleSet t = TupleSet::fig1();
  CHECK(t.tuples().size() == 6);
  CHECK(std::is_sorted(t.tuples().begin(), t.tuples().end()));
  CHECK_THROWS_AS(TupleSet(3, 3, {{0, 2, 1}}), PreconditionError);
  CHECK(TupleSet(2, 2, {{0, 0}, {1, 1}, {0, 0}}).tuples().size() == 2);
  CHECK(TupleSet::constants(4, 4).tuples().size() == 4);
}

TEST_CASE("view_of follows the declared view order") {
  CHECK(view_of(kFig1, "A", {0, 2, 1}) == std::vector<int>{0, 2});
  CHECK(view_of(kFig1, "D", {0, 2, 1}) == std::vector<int>{1, 0});
  for (int c = 0; c < 3; ++c) {
    for (const auto& p : kFig1.parties) CHECK(view_of(kFig1, p.name, {c, c, c}) == std::vector<int>{c, c});
  }
}

TEST_CASE("compatibility") {
  const TupleSet t = TupleSet::fig1();
  CHECK(is_compatible(kFig1, "A", {0, 2}, t));
  CHECK_FALSE(is_compatible(kFig1, "A", {0, 1}, t));
  for (int c = 0; c < 3; ++c) {
    for (const auto& p : kFig1.parties) CHECK(is_compatible(kFig1, p.name, {c, c}, t));
  }
}

TEST_CASE("every fig1 party has ambiguous views 01, 12, 20") {
  const CmStrategy s(kFig1, TupleSet::fig1());
  for (std::size_t p = 0; p < 4; ++p) {
    std::vector<std::vector<int>> views;
    for (auto v : s.ambiguous_views(p)) views.push_back(s.view_colors(p, v));
    CHECK(views == std::vector<std::vector<int>>{{0, 1}, {1, 2}, {2, 0}});
    CHECK(s.compatible_views(p).size() == 6);
  }
}

TEST_CASE("classical outcomes") {
  const TupleSet t = TupleSet::fig1();
  CHECK(classical_outcome(kFig1, t, {0, 0, 0}) == tuple({"00", "00", "00", "00"}));
  CHECK(classical_outcome(kFig1, t, {0, 1, 2}) == tuple({"chi", "chi", "chi", "chi"}));
  CHECK(classical_outcome(kFig1, t, {0, 0, 1}) == tuple({"00", "chi", "chi", "10"}));
}

TEST_CASE("classical outcomes agree with a direct tuple scan") {
  const TupleSet t = TupleSet::fig1();
  for (const auto& a : all_assignments(3, 3)) CHECK(classical_outcome(kFig1, t, a) == oracle_outcome(kFig1, t.tuples(), a));
  const Network g4 = make_gm(4);
  const TupleSet c4 = TupleSet::constants(4, 4);
  for (const auto& a : all_assignments(4, 4)) CHECK(classical_outcome(g4, c4, a) == oracle_outcome(g4, c4.tuples(), a));
}

TEST_CASE("P_color on fig1") {
  const Distribution d = compute_pcolor(kFig1, TupleSet::fig1());
  CHECK(d.exact());
  CHECK(d.exact_probability(tuple({"00", "00", "00", "00"})) == Rational(1, 27));
  CHECK(d.exact_probability(tuple({"chi", "chi", "chi", "chi"})) == Rational(1, 9));
  CHECK(d.exact_probability(tuple({"00", "chi", "chi", "10"})) == Rational(1, 27));
  CHECK(d.exact_total() == 1);
  CHECK(d.support_size() <= 27);
}

TEST_CASE("P_color equals the brute-force count") {
  const TupleSet t = TupleSet::fig1();
  std::map<OutcomeTuple, Rational> counts;
  for (const auto& a : all_assignments(3, 3)) counts[oracle_outcome(kFig1, t.tuples(), a)] += Rational(1, 27);
  CHECK(compute_pcolor(kFig1, t).exact_table() == counts);
}

TEST_CASE("assignments with no ambiguous output are exactly the tuples") {
  const TupleSet t = TupleSet::fig1();
  const Distribution d = compute_pcolor(kFig1, t);
  std::set<ColorAssignment> clean;
  for (const auto& a : all_assignments(3, 3)) {
    const OutcomeTuple o = classical_outcome(kFig1, t, a);
    if (std::all_of(o.begin(), o.end(), [](const Outcome& x) { return x.is_view(); })) {
      clean.insert(a);
      CHECK(d.exact_probability(o) == Rational(1, 27));
    }
  }
  CHECK(clean == std::set<ColorAssignment>(t.tuples().begin(), t.tuples().end()));
}

TEST_CASE("P_color is covariant under global color permutations") {
  const TupleSet t = TupleSet::fig1();
  const Distribution d = compute_pcolor(kFig1, t);
  std::vector<int> perm = {0, 1, 2};
  do {
    std::vector<ColorAssignment> moved;
    for (auto a : t.tuples()) {
      for (int& c : a) c = perm[c];
      moved.push_back(a);
    }
    const Distribution e = compute_pcolor(kFig1, TupleSet(3, 3, moved));
    CHECK(e.exact_total() == 1);
    for (const auto& [o, p] : d.exact_table()) {
      OutcomeTuple q = o;
      for (auto& x : q) {
        if (x.is_view()) {
          for (int& c : x.colors) c = perm[c];
        }
      }
      CHECK(e.exact_probability(q) == p);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("hidden patterns of fig1") {
  const auto p = enumerate_hidden_patterns(kFig1, TupleSet::fig1());
  CHECK(p == std::vector<ColorAssignment>{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}});
}

TEST_CASE("hidden patterns of G_4 are the proper colorings of K_4") {
  const auto p = enumerate_hidden_patterns(make_gm(4), TupleSet::constants(4, 4));
  CHECK(p.size() == 24);
  for (const auto& a : p) CHECK(std::set<int>(a.begin(), a.end()).size() == 4);
}

TEST_CASE("hidden patterns are exactly the all-ambiguous assignments") {
  for (const auto& [net, t] : {std::pair{kFig1, TupleSet::fig1()}, std::pair{make_gm(3), TupleSet::constants(3, 3)},
                               std::pair{make_kn(4), TupleSet::constants(6, 2)}}) {
    const auto patterns = enumerate_hidden_patterns(net, t);
    const std::set<ColorAssignment> set(patterns.begin(), patterns.end());
    for (const auto& a : all_assignments(net.num_sources(), net.colors)) {
      const OutcomeTuple o = classical_outcome(net, t, a);
      const bool all = std::all_of(o.begin(), o.end(), [](const Outcome& x) { return x.is_ambiguous(); });
      CHECK(all == (set.count(a) == 1));
    }
  }
}

TEST_CASE("all tuples compatible means no hidden pattern") {
  const TupleSet all(3, 3, all_assignments(3, 3));
  CHECK(enumerate_hidden_patterns(kFig1, all).empty());
}

TEST_CASE("enumeration cap") {
  CHECK_THROWS_AS(compute_pcolor(kFig1, TupleSet::fig1(), 26), CapExceededError);
  CHECK_THROWS_AS(enumerate_hidden_patterns(kFig1, TupleSet::fig1(), 26), CapExceededError);
}
