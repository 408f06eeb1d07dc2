#include "ccprobe/schema.hpp"

#include <cmath>
#include <set>

#include "ccprobe/error.hpp"

namespace ccprobe {

std::string_view to_string(DimensionKind kind) {
  switch (kind) {
    case DimensionKind::continuous: return "continuous";
    case DimensionKind::discrete: return "discrete";
    case DimensionKind::binary: return "binary";
  }
  return "continuous";
}

DimensionKind parse_dimension_kind(std::string_view text) {
  if (text == "continuous") return DimensionKind::continuous;
  if (text == "discrete") return DimensionKind::discrete;
  if (text == "binary") return DimensionKind::binary;
  throw data_error("unknown dimension kind '" + std::string(text) + "'");
}

StateSchema::StateSchema(std::vector<DimensionSchema> dims) : dims_(std::move(dims)) {
  std::set<std::string> seen;
  for (auto& d : dims_) {
    if (d.name.empty()) throw data_error("dimension name must not be empty");
    if (!seen.insert(d.name).second) throw data_error("duplicate dimension name '" + d.name + "'");
    if (d.kind == DimensionKind::binary) {
      if (!d.lower) d.lower = 0.0;
      if (!d.upper) d.upper = 1.0;
      if (*d.lower != 0.0 || *d.upper != 1.0) throw data_error("binary dimension '" + d.name + "' must span [0, 1]");
    }
    if (d.lower && d.upper && !(*d.lower < *d.upper))
      throw data_error("dimension '" + d.name + "' needs lower < upper");
  }
}

std::optional<std::size_t> StateSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (dims_[i].name == name) return i;
  return std::nullopt;
}

std::size_t StateSchema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw data_error("unknown dimension '" + std::string(name) + "'");
}

bool StateSchema::admits(std::size_t dim, double value) const {
  if (!std::isfinite(value)) return false;
  const auto& d = dims_.at(dim);
  if (d.kind == DimensionKind::continuous) return true;
  if (value != std::floor(value)) return false;
  if (d.lower && value < *d.lower) return false;
  if (d.upper && value > *d.upper) return false;
  return true;
}

}  // namespace ccprobe
