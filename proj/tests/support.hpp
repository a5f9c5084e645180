#pragma once

#include <string>

#include <gtest/gtest.h>

#include "divergelab/error.hpp"

namespace testing_support {

/// Runs f and returns the code of the divergelab::Error it throws.
template <typename F>
divergelab::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const divergelab::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no divergelab::Error thrown";
  return divergelab::ErrorCode::kInternalConsistency;
}

inline std::string fixture(const std::string& name) { return std::string(DIVERGELAB_FIXTURE_DIR) + "/" + name; }

}  // namespace testing_support

using testing_support::code_of;
