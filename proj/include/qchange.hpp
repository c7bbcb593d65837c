// Copyright 2026 The qchange Authors
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

#pragma once

#include "qchange/cusum.hpp"
#include "qchange/entropy.hpp"
#include "qchange/errors.hpp"
#include "qchange/gaussian_state.hpp"
#include "qchange/io.hpp"
#include "qchange/jointcomm.hpp"
#include "qchange/models.hpp"
#include "qchange/optimize.hpp"
#include "qchange/photon_counting.hpp"
#include "qchange/pmf.hpp"
#include "qchange/qre.hpp"
#include "qchange/receivers.hpp"
#include "qchange/special_functions.hpp"
