// SPDX-License-Identifier: Apache-2.0
// Copyright (c) tinsum contributors

#pragma once

#include <stdexcept>
#include <string>

namespace tinsum {

enum class Errc {
  invalid_input,
  not_positive_definite,
  precondition_violated,
  invalid_genie,
  no_valid_genie,
  unsupported,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

} // namespace tinsum
