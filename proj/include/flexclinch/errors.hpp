//------------------------------------------------------------------------------
//
//   Copyright 2026 The flexclinch authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <stdexcept>

namespace flexclinch {

// Malformed or out-of-domain input.
struct InputError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

// Reward curvature b == 0: the marginal-reward curve is flat, so it cannot
// be inverted into a demand schedule and no descending-price auction exists.
// Flat-reward instances are only usable through fixed-price evaluation.
struct DegenerateDemandError : std::domain_error
{
  using std::domain_error::domain_error;
};

// A protocol node is missing data it needs for its next step.
struct ProtocolStallError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// A file could not be read or written.
struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// A guard that should be unreachable fired.
struct InternalError : std::logic_error
{
  using std::logic_error::logic_error;
};

}  // namespace flexclinch
