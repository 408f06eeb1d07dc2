#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ccprobe/schema.hpp"

namespace ccprobe {

/// n x d matrix of states conforming to a schema, stored row-major.
class StateTable {
 public:
  StateTable() = default;
  /// Validates every row: finite values, integral in-bounds entries on discrete/binary dims.
  StateTable(StateSchema schema, std::vector<double> values, std::string provenance = "memory");

  const StateSchema& schema() const noexcept { return schema_; }
  std::size_t rows() const noexcept { return cols() == 0 ? 0 : values_.size() / cols(); }
  std::size_t cols() const noexcept { return schema_.size(); }

  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols(), cols()}; }
  std::span<const double> values() const noexcept { return values_; }

  const std::string& provenance() const noexcept { return provenance_; }

  /// Single-row table sharing this schema.
  StateTable select_row(std::size_t i) const;

  bool operator==(const StateTable& other) const { return schema_ == other.schema_ && values_ == other.values_; }

 private:
  StateSchema schema_;
  std::vector<double> values_;
  std::string provenance_;
};

}  // namespace ccprobe
