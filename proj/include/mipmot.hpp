// Copyright 2026 The mipmot Authors. All Rights Reserved.
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

#include "mipmot/affinity.hpp"
#include "mipmot/assignment.hpp"
#include "mipmot/association.hpp"
#include "mipmot/config.hpp"
#include "mipmot/detection.hpp"
#include "mipmot/error.hpp"
#include "mipmot/eval.hpp"
#include "mipmot/geometry.hpp"
#include "mipmot/io.hpp"
#include "mipmot/kalman.hpp"
#include "mipmot/keyvalue.hpp"
#include "mipmot/pipeline.hpp"
#include "mipmot/simgen.hpp"
#include "mipmot/tracker.hpp"
