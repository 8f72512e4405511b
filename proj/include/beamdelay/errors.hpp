// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace beamdelay {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Jakes autocorrelation resolved to a negative value (delay past the first zero of J0).
class BeyondFirstZeroError : public DomainError {
public:
    explicit BeyondFirstZeroError(double rho)
        : DomainError("persistence beyond first zero of J0: rho = " + std::to_string(rho)), rho_(rho) {}
    double rho() const noexcept { return rho_; }

private:
    double rho_;
};

/// Series did not reach the requested tolerance within its term budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial_sum)
        : std::runtime_error(what), partial_sum_(partial_sum) {}
    double partial_sum() const noexcept { return partial_sum_; }

private:
    double partial_sum_;
};

/// Request exceeds a supported size (e.g. polynomial degree).
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature could not meet its accuracy contract.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Result not representable (e.g. outage underflow in a slope fit).
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

}  // namespace beamdelay
