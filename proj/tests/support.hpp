#pragma once

#include <optional>
#include <utility>

#include "sdae/errors.hpp"

// Runs f and reports which library error code it threw, if any; lets tests
// assert on the classification instead of matching message strings.
template <class F>
std::optional<sdae::ErrorCode> error_code_of(F&& f) {
  try {
    std::forward<F>(f)();
  } catch (const sdae::Error& e) {
    return e.code();
  }
  return std::nullopt;
}
