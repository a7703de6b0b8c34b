#pragma once

// Machine-readable reports. Key order is fixed; no timings or other
// run-dependent fields, so equal inputs give byte-equal output.

#include "abct/alu.hpp"
#include "abct/attack.hpp"
#include "abct/forge.hpp"
#include "abct/search.hpp"

#include <json.hpp>

namespace abct {

using Json = nlohmann::ordered_json;

Json to_json(const Codebook& cb);
Json to_json(const CandidateEmbedding& e);
Json to_json(const HomomorphismReport& r);
Json to_json(std::span<const AccidentalPair> pairs);
Json to_json(const AttackOutcome& o);
Json to_json(const AttackMatrix& m);
Json to_json(const PairSearchReport& r);
Json to_json(const CliqueReport& r);
Json to_json(const ClosureReport& r);
Json to_json(const ConstantExprReport& r);
Json to_json(const Lemma1Report& r);

}  // namespace abct
