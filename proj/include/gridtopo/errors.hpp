#pragma once

#include <stdexcept>
#include <string>

namespace gridtopo {

// Bad or inconsistent input data (unreadable files, wrong columns for a model,
// duplicate lines, insufficient samples). CLI maps this to exit code 3.
struct schema_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure (singular systems after jitter retry, divergence,
// undefined metrics). CLI maps this to exit code 4.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gridtopo
