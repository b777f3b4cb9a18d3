// Copyright 2026 The polchip Authors
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

#pragma once

#include "polchip/birefringence.hpp"
#include "polchip/elements.hpp"
#include "polchip/entanglement.hpp"
#include "polchip/fitting.hpp"
#include "polchip/interference.hpp"
#include "polchip/quantum_state.hpp"
#include "polchip/scan.hpp"
#include "polchip/singlet_filter.hpp"
#include "polchip/source.hpp"
#include "polchip/tomography.hpp"
