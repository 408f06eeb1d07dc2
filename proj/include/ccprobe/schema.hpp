#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccprobe {

enum class DimensionKind { continuous, discrete, binary };

std::string_view to_string(DimensionKind kind);
DimensionKind parse_dimension_kind(std::string_view text);

struct DimensionSchema {
  std::string name;
  DimensionKind kind = DimensionKind::continuous;
  std::optional<double> lower;
  std::optional<double> upper;

  bool operator==(const DimensionSchema&) const = default;
};

/// Ordered list of state dimensions. Names are unique; bounds ordered when both present.
class StateSchema {
 public:
  StateSchema() = default;
  explicit StateSchema(std::vector<DimensionSchema> dims);

  std::size_t size() const noexcept { return dims_.size(); }
  const DimensionSchema& operator[](std::size_t i) const { return dims_[i]; }
  const std::vector<DimensionSchema>& dims() const noexcept { return dims_; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws on unknown name

  /// Whether `value` is a legal entry for dimension `dim` (integral and in bounds for discrete/binary).
  bool admits(std::size_t dim, double value) const;

  bool operator==(const StateSchema&) const = default;

 private:
  std::vector<DimensionSchema> dims_;
};

}  // namespace ccprobe
