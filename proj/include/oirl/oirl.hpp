// Copyright 2026 The OnlineIRL Authors
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


#ifndef OIRL_OIRL_HPP_
#define OIRL_OIRL_HPP_

#include "oirl/config.hpp"
#include "oirl/dynamics.hpp"
#include "oirl/errors.hpp"
#include "oirl/harness.hpp"
#include "oirl/io.hpp"
#include "oirl/irl.hpp"
#include "oirl/linalg.hpp"
#include "oirl/purging.hpp"
#include "oirl/sysid.hpp"

#endif  // OIRL_OIRL_HPP_
