// Copyright 2026 The zodp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ZODP_PRIVACY_H_
#define ZODP_PRIVACY_H_

#include "zodp/estimator.h"
#include "zodp/problems.h"
#include "zodp/sampling.h"

namespace zodp {

struct PrivacyBudget {
  double eps = 0;
  double delta = 0;

  // Throws unless eps > 0 and 0 < delta < 1.
  static PrivacyBudget checked(double eps, double delta);
};

// log(e + eps/delta), the composition log factor shared by every derived
// quantity.
double privacy_log_term(const PrivacyBudget& budget);

// Replacement sensitivity of an average of values clipped to norm C.
double sensitivity_bound(double clip, int n);

// Gaussian mechanism scale for T adaptively composed releases of a
// C-clipped average: sigma = 4 C sqrt(2 T log(e + eps/delta)) / (n eps).
double noise_scale(double clip, int n, int T, const PrivacyBudget& budget);

struct NoiseCalibration {
  double clip = 0;
  int n = 0;
  int T = 0;
  PrivacyBudget budget;
  double sensitivity = 0;
  double sigma = 0;
};

NoiseCalibration calibrate_noise(double clip, int n, int T,
                                 const PrivacyBudget& budget);

// Brute-force replacement-sensitivity measurement. Every sample of p is
// swapped against every sample of pool (which must share p's dimension),
// and the released averages are compared: scalar release = mean of clipped
// difference quotients, vector release = mean of per-sample clipped
// two-point gradients. Both maxima must come out <= 2C/n.
struct SensitivityProbe {
  double scalar_release = 0;
  double vector_release = 0;
  double bound = 0;
};

SensitivityProbe verify_sensitivity(const Problem& p, const Problem& pool,
                                    const Vector& x, const Direction& u,
                                    double lambda, double clip);

}  // namespace zodp

#endif  // ZODP_PRIVACY_H_
