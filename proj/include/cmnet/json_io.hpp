#pragma once

#include "cmnet/classical.hpp"
#include "cmnet/distribution.hpp"
#include "cmnet/finner.hpp"
#include "cmnet/network.hpp"
#include "cmnet/quantum.hpp"
#include "cmnet/rigidity_lp.hpp"
#include "cmnet/search.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace cmnet {

/// Keys keep insertion order, so serialized reports are byte-stable.
using Json = nlohmann::ordered_json;

/// Could not read or write a file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads and parses a JSON file; IoError when unreadable, SchemaError when
/// malformed.
Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
/// Writes `doc` indented by two spaces plus a trailing newline; "-" is stdout.
void write_json_file(const std::string& path, const Json& doc);
std::string dump(const Json& doc);

/// FNV-1a 64-bit digest as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& bytes);

Json to_json(const Network& net);
/// Throws SchemaError on a malformed document; semantic validity is checked
/// separately by validate_network.
Network network_from_json(const Json& doc);

Json to_json(const TupleSet& tuples);
TupleSet tuples_from_json(const Json& doc, const Network& net);
/// "builtin:fig1", "builtin:constants" or a file path.
TupleSet load_tuples(const std::string& spec, const Network& net);

Json to_json(const Distribution& d);
Distribution distribution_from_json(const Json& doc);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& doc);

Json to_json(const RefinementUnitary& u);
/// A single refinement object, an array of them, or any object with a
/// "refinements" array (such as a search report). Party "*" applies the
/// matrix to every party with a nonempty ambiguous subspace.
std::vector<RefinementUnitary> refinements_from_json(const Json& doc, const Network& net,
                                                     const TupleSet& tuples);
/// "builtin:identity" or a file path.
std::vector<RefinementUnitary> load_refinements(const std::string& spec, const Network& net,
                                                const TupleSet& tuples);

Json to_json(const SourceState& s);
SourceState source_state_from_json(const Json& doc);

Json to_json(const FinnerWeights& w);
FinnerWeights weights_from_json(const Json& doc);

Json to_json(const FinnerReport& r);
Json to_json(const Certification& c);

/// At most `max_history` trajectory entries, evenly spaced, always keeping
/// the last one.
Json to_json(const SearchResult& r, std::size_t max_history = 200);

}  // namespace cmnet
