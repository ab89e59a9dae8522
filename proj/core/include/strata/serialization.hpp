#pragma once

#include "strata/memory_state.hpp"
#include "strata/types.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace strata {

// Canonical form: UTF-8 JSON, fields in declaration order, integer
// timestamps, doubles in shortest round-trip notation.
using Json = nlohmann::ordered_json;

Json to_json(const DialoguePage& page);
Json to_json(const Segment& segment);
Json to_json(const FactEntry& fact);
Json to_json(const FactQueue& queue);
Json to_json(const TraitValue& trait);
Json to_json(const PersonaStore& persona);
Json to_json(const ShortTermMemory& stm);
Json to_json(const MidTermMemory& mtm);

// Structural errors raise Error(parse) with a JSON-path location such as
// "$.mtm.segments[2].pages[0].query"; invariant breaches raise
// Error(corruption).
DialoguePage page_from_json(const Json& doc, const std::string& path = "$");
Segment segment_from_json(const Json& doc, const std::string& path = "$");
FactEntry fact_from_json(const Json& doc, const std::string& path = "$");
FactQueue fact_queue_from_json(const Json& doc, const std::string& path = "$");
PersonaStore persona_from_json(const Json& doc, const std::string& path = "$");
ShortTermMemory stm_from_json(const Json& doc, const std::string& path = "$");
MidTermMemory mtm_from_json(const Json& doc, const std::string& path = "$");

// Wire form used by the HTTP API: like to_json but without embeddings, with
// scores and segment ids on hits.
Json bundle_to_wire(const RetrievalBundle& bundle);
Json page_to_wire(const DialoguePage& page);

} // namespace strata
