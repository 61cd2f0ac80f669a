// Copyright 2026 The bbforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BBFORGE_ERROR_HPP
#define BBFORGE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace bbforge {

enum class ErrorKind {
  kCapacity,
  kShape,
  kDomain,
  kInfeasible,
  kInconsistency,
  kDegenerateTime,
  kNonRepresentable,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Infeasible solver outcome that still carries the best residual seen.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& message, double best_residual)
      : Error(ErrorKind::kInfeasible, message), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace bbforge

#endif  // BBFORGE_ERROR_HPP
