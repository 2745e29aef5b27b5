#pragma once

// JSON renderings of the report types. Key order is fixed so that reports
// are byte-stable for identical inputs.

#include <map>
#include <span>
#include <string>

#include <json.hpp>

#include "commontom/cogstate.hpp"
#include "commontom/corpus.hpp"
#include "commontom/eval.hpp"
#include "commontom/querygen.hpp"

namespace ctom {

nlohmann::ordered_json to_json(const Provenance& p);
nlohmann::ordered_json to_json(const MetricsReport& r);
nlohmann::ordered_json to_json(const BaselineReport& r);
nlohmann::ordered_json to_json(const std::map<Split, YesNo>& counts);
nlohmann::ordered_json validation_report(std::span<const Dialog> corpus);
nlohmann::ordered_json divergence_report(const CorpusInference& inference);

}  // namespace ctom
