#pragma once

#include <json.hpp>
#include <string_view>

#include "hedgedim/arithmetic.hpp"

namespace hedgedim {

using json = nlohmann::json;

// Accepts "123.5", "-1e40" or the tower form "E^2(5.28e8)".
Tower parse_tower(std::string_view s);

json digits_to_json(const DigitSequence& seq);
// Digits written as plain decimals are exact; {"log": ...} digits are not.
DigitSequence digits_from_json(const json& j);

json to_json(const BrjunoEvaluation& ev);
json to_json(const HermanReport& r);
json to_json(const JaggedReport& r);
json to_json(const WitnessReport& r);
json to_json(const SpikyReport& r);
json to_json(const SpikyChainReport& r);
json to_json(const std::vector<AlphaTail>& t);

}  // namespace hedgedim
