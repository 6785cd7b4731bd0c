#include "nl2sql/llm/model.hpp"

#include <cmath>

#include "nl2sql/common/error.hpp"

namespace nl2sql::llm {

void ModelRef::validate() const {
  if (!(params.temperature >= 0.0) || !std::isfinite(params.temperature)) {
    throw ConfigError("model '" + model_id + "': temperature must be >= 0");
  }
  if (params.max_tokens < 1) throw ConfigError("model '" + model_id + "': max_tokens must be >= 1");
}

}  // namespace nl2sql::llm
