#pragma once

#include <json.hpp>

#include "logsymcure/inference.hpp"
#include "logsymcure/nonparam.hpp"
#include "logsymcure/simulate.hpp"

namespace lsc {

using Json = nlohmann::ordered_json;

/// NaN and infinities are written as null and read back as NaN.
Json to_json(const FitResult& fit);
FitResult fit_from_json(const Json& j);

Json to_json(const ModelSpec& model);
ModelSpec model_from_json(const Json& j);

Json to_json(const std::vector<SelectionRow>& rows);
Json to_json(const SimSummary& summary);
Json to_json(const KaplanMeier& curve);

}  // namespace lsc
