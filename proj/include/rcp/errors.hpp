#pragma once

#include <stdexcept>
#include <string>

namespace rcp {

struct ZeroScaleError : std::runtime_error {
  int column;
  explicit ZeroScaleError(int col)
      : std::runtime_error("zero scale (MAD = 0) in column " + std::to_string(col)),
        column(col) {}
};

struct DegenerateLrvError : std::runtime_error {
  explicit DegenerateLrvError(const std::string& what)
      : std::runtime_error("degenerate long-run covariance: " + what) {}
};

struct NotTabulatedError : std::runtime_error {
  explicit NotTabulatedError(const std::string& what)
      : std::runtime_error("not tabulated: " + what) {}
};

struct NonPositiveInputError : std::runtime_error {
  explicit NonPositiveInputError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rcp
