#pragma once

#include <gtest/gtest.h>

#include <functional>

#include "nare/errors.hpp"

inline nare::ErrorCode thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const nare::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a nare::Error";
  return nare::ErrorCode::InvalidArgument;
}
