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

#ifndef BBFORGE_SRC_LEAST_SQUARES_HPP
#define BBFORGE_SRC_LEAST_SQUARES_HPP

#include <functional>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "bbforge/linalg.hpp"

namespace bbforge::detail {

using ResidualFn = std::function<RVector(const RVector&)>;

struct LeastSquaresOutcome {
  RVector x;
  double cost = 0.0;  // ‖residual‖₂
};

/// Levenberg–Marquardt with forward-difference Jacobian. Residual vectors
/// shorter than the parameter count are zero-padded (MINPACK needs m ≥ n).
inline LeastSquaresOutcome minimize_least_squares(const ResidualFn& residual, RVector x0,
                                                  Eigen::Index num_residuals, int max_evals = 2000) {
  struct Functor {
    using Scalar = double;
    using InputType = RVector;
    using ValueType = RVector;
    using JacobianType = RMatrix;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const ResidualFn* fn;
    Eigen::Index n_in;
    Eigen::Index n_out;

    Eigen::Index inputs() const { return n_in; }
    Eigen::Index values() const { return n_out; }

    int operator()(const RVector& x, RVector& f) const {
      const RVector r = (*fn)(x);
      f.setZero(n_out);
      f.head(r.size()) = r;
      return 0;
    }
  };

  const Eigen::Index n_in = x0.size();
  const Eigen::Index n_out = std::max(num_residuals, n_in);
  Functor functor{&residual, n_in, n_out};
  Eigen::NumericalDiff<Functor> numeric(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor>, double> lm(numeric);
  lm.parameters.maxfev = max_evals;
  lm.parameters.xtol = 1e-15;
  lm.parameters.ftol = 1e-15;
  lm.minimize(x0);
  return {x0, residual(x0).norm()};
}

}  // namespace bbforge::detail

#endif  // BBFORGE_SRC_LEAST_SQUARES_HPP
