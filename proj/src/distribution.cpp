#include "cmnet/distribution.hpp"

#include "cmnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cmnet {

Outcome Outcome::view(std::vector<int> colors) {
  Outcome o;
  o.kind = Kind::kView;
  o.colors = std::move(colors);
  return o;
}

Outcome Outcome::refined(int r) {
  if (r < 1) throw PreconditionError("refined outcome index must be >= 1");
  Outcome o;
  o.kind = Kind::kRefined;
  o.index = r;
  return o;
}

Outcome Outcome::ambiguous() { return Outcome{}; }

Outcome Outcome::custom(std::string label) {
  Outcome o;
  o.kind = Kind::kLabel;
  o.label = std::move(label);
  return o;
}

namespace {

constexpr std::string_view kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";

}  // namespace

std::string Outcome::str() const {
  switch (kind) {
    case Kind::kView: {
      std::string s;
      for (int c : colors) {
        if (c < 0 || c >= static_cast<int>(kDigits.size())) {
          throw PreconditionError("color out of serializable range");
        }
        s += kDigits[static_cast<std::size_t>(c)];
      }
      return s;
    }
    case Kind::kRefined:
      return "chi:" + std::to_string(index);
    case Kind::kAmbiguous:
      return "chi";
    case Kind::kLabel:
      return "lbl:" + label;
  }
  return {};
}

Outcome Outcome::parse(const std::string& text) {
  if (text == "chi") return ambiguous();
  if (text.rfind("chi:", 0) == 0) {
    const std::string num = text.substr(4);
    if (num.empty() || !std::all_of(num.begin(), num.end(), ::isdigit)) {
      throw SchemaError("bad refined outcome '" + text + "'");
    }
    return refined(std::stoi(num));
  }
  if (text.rfind("lbl:", 0) == 0) return custom(text.substr(4));
  if (text.empty()) throw SchemaError("empty outcome string");
  std::vector<int> colors;
  for (char ch : text) {
    const auto pos = kDigits.find(ch);
    if (pos == std::string_view::npos) throw SchemaError("bad outcome '" + text + "'");
    colors.push_back(static_cast<int>(pos));
  }
  return view(std::move(colors));
}

std::string to_string(const OutcomeTuple& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += t[i].str();
  }
  return s;
}

Distribution::Distribution(std::vector<std::string> parties, std::map<OutcomeTuple, Rational> table)
    : mode_(Mode::kExact), parties_(std::move(parties)), exact_(std::move(table)) {
  std::erase_if(exact_, [](const auto& kv) { return kv.second.is_zero(); });
}

Distribution::Distribution(std::vector<std::string> parties, std::map<OutcomeTuple, double> table)
    : mode_(Mode::kFloat), parties_(std::move(parties)), real_(std::move(table)) {}

std::size_t Distribution::support_size() const { return exact() ? exact_.size() : real_.size(); }

std::vector<OutcomeTuple> Distribution::support() const {
  std::vector<OutcomeTuple> keys;
  if (exact()) {
    for (const auto& [k, v] : exact_) keys.push_back(k);
  } else {
    for (const auto& [k, v] : real_) keys.push_back(k);
  }
  return keys;
}

double Distribution::probability(const OutcomeTuple& t) const {
  if (exact()) {
    auto it = exact_.find(t);
    return it == exact_.end() ? 0.0 : to_double(it->second);
  }
  auto it = real_.find(t);
  return it == real_.end() ? 0.0 : it->second;
}

Rational Distribution::exact_probability(const OutcomeTuple& t) const {
  if (!exact()) throw PreconditionError("exact_probability on a float distribution");
  auto it = exact_.find(t);
  return it == exact_.end() ? Rational(0) : it->second;
}

double Distribution::total() const {
  if (exact()) return to_double(exact_total());
  double s = 0.0;
  for (const auto& [k, v] : real_) s += v;
  return s;
}

Rational Distribution::exact_total() const {
  if (!exact()) throw PreconditionError("exact_total on a float distribution");
  Rational s = 0;
  for (const auto& [k, v] : exact_) s += v;
  return s;
}

void Distribution::check() const {
  std::set<std::string> names(parties_.begin(), parties_.end());
  if (names.size() != parties_.size()) throw PreconditionError("distribution has duplicate parties");
  auto check_key = [&](const OutcomeTuple& k) {
    if (k.size() != parties_.size()) {
      throw PreconditionError("outcome tuple arity does not match party count");
    }
  };
  if (exact()) {
    for (const auto& [k, v] : exact_) {
      check_key(k);
      if (v < 0) throw PreconditionError("negative probability");
    }
    if (exact_total() != 1) throw PreconditionError("exact distribution does not sum to 1");
  } else {
    for (const auto& [k, v] : real_) {
      check_key(k);
      if (!(v >= 0.0)) throw PreconditionError("negative or NaN probability");
    }
    if (std::abs(total() - 1.0) > 1e-10) throw PreconditionError("distribution does not sum to 1");
  }
}

namespace {

template <class Map, class KeyFn>
Map regroup(const Map& in, KeyFn&& key_fn) {
  Map out;
  for (const auto& [k, v] : in) out[key_fn(k)] += v;
  return out;
}

}  // namespace

Distribution marginal(const Distribution& d, const std::vector<std::string>& keep) {
  if (keep.empty()) throw PreconditionError("marginal over an empty party set");
  std::set<std::string> wanted(keep.begin(), keep.end());
  std::vector<std::size_t> positions;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < d.parties().size(); ++i) {
    if (wanted.count(d.parties()[i])) {
      positions.push_back(i);
      names.push_back(d.parties()[i]);
    }
  }
  if (names.size() != wanted.size()) throw PreconditionError("marginal over unknown party");

  auto project = [&](const OutcomeTuple& t) {
    OutcomeTuple sub;
    sub.reserve(positions.size());
    for (std::size_t p : positions) sub.push_back(t[p]);
    return sub;
  };
  if (d.exact()) return Distribution(names, regroup(d.exact_table(), project));
  return Distribution(names, regroup(d.float_table(), project));
}

Distribution coarse_grain(const Distribution& d, const OutcomeMapping& mapping) {
  std::vector<const std::map<Outcome, Outcome>*> per_party(d.parties().size(), nullptr);
  for (const auto& [name, m] : mapping) {
    auto it = std::find(d.parties().begin(), d.parties().end(), name);
    if (it == d.parties().end()) throw PreconditionError("mapping for unknown party '" + name + "'");
    per_party[static_cast<std::size_t>(it - d.parties().begin())] = &m;
  }
  auto relabel = [&](const OutcomeTuple& t) {
    OutcomeTuple out = t;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!per_party[i]) continue;
      auto it = per_party[i]->find(t[i]);
      if (it == per_party[i]->end()) {
        throw PreconditionError("coarse-graining map for party '" + d.parties()[i] +
                                "' has no image for outcome '" + t[i].str() + "'");
      }
      out[i] = it->second;
    }
    return out;
  };
  if (d.exact()) return Distribution(d.parties(), regroup(d.exact_table(), relabel));
  return Distribution(d.parties(), regroup(d.float_table(), relabel));
}

Distribution merge_refinements(const Distribution& d) {
  auto relabel = [](const OutcomeTuple& t) {
    OutcomeTuple out = t;
    for (auto& o : out) {
      if (o.is_refined()) o = Outcome::ambiguous();
    }
    return out;
  };
  if (d.exact()) return Distribution(d.parties(), regroup(d.exact_table(), relabel));
  return Distribution(d.parties(), regroup(d.float_table(), relabel));
}

double tv_distance(const Distribution& a, const Distribution& b) {
  if (a.parties() != b.parties()) throw PreconditionError("tv_distance: party lists differ");
  if (a.exact() && b.exact()) {
    Rational sum = 0;
    auto keys = a.support();
    for (const auto& k : b.support()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto& k : keys) sum += abs(Rational(a.exact_probability(k) - b.exact_probability(k)));
    return to_double(sum / 2);
  }
  std::set<OutcomeTuple> keys;
  for (const auto& k : a.support()) keys.insert(k);
  for (const auto& k : b.support()) keys.insert(k);
  double sum = 0.0;
  for (const auto& k : keys) sum += std::abs(a.probability(k) - b.probability(k));
  return sum / 2.0;
}

Distribution to_float(const Distribution& d) {
  if (!d.exact()) return d;
  std::map<OutcomeTuple, double> table;
  for (const auto& [t, p] : d.exact_table()) table.emplace(t, to_double(p));
  return Distribution(d.parties(), std::move(table));
}

}  // namespace cmnet
