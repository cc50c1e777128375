#include <string>

#include "spread/estimators.hpp"

namespace spread {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kScale: return "scale";
    case Method::kDensity: return "density";
    case Method::kPollSpreader: return "pollspreader";
    case Method::kPollSusLower: return "pollsus_lower";
    case Method::kPollSusUpper: return "pollsus_upper";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kScale, Method::kDensity, Method::kPollSpreader, Method::kPollSusLower,
                   Method::kPollSusUpper}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidInput("unknown estimator '" + std::string(name) +
                     "' (expected scale, density, pollspreader, pollsus_lower, pollsus_upper)");
}

}  // namespace spread
