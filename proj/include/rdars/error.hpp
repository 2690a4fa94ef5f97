// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdars {

enum class ErrorKind {
  DimensionMismatch,
  InvalidInput,
  NotPositiveDefinite,
  CapExceeded,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Library error carrying a machine-readable kind next to the message.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void throw_dimension_mismatch(std::string_view operand, long expected_rows, long expected_cols,
                                           long rows, long cols);

} // namespace rdars
