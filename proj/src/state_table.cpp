#include "ccprobe/state_table.hpp"

#include <cmath>

#include "ccprobe/error.hpp"

namespace ccprobe {

StateTable::StateTable(StateSchema schema, std::vector<double> values, std::string provenance)
    : schema_(std::move(schema)), values_(std::move(values)), provenance_(std::move(provenance)) {
  const std::size_t d = schema_.size();
  if (d == 0) throw data_error("state table needs at least one dimension");
  if (values_.size() % d != 0) throw data_error("state values are not a multiple of the dimension count");
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double v = values_[r * d + c];
      if (!std::isfinite(v))
        throw data_error("non-finite value in row " + std::to_string(r) + ", column '" + schema_[c].name + "'");
      if (!schema_.admits(c, v))
        throw data_error("value " + std::to_string(v) + " in row " + std::to_string(r) + " is not valid for " +
                         std::string(to_string(schema_[c].kind)) + " dimension '" + schema_[c].name + "'");
    }
  }
}

StateTable StateTable::select_row(std::size_t i) const {
  auto r = row(i);
  return StateTable(schema_, std::vector<double>(r.begin(), r.end()), provenance_);
}

}  // namespace ccprobe
