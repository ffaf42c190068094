// Copyright 2026 The quenchlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "quenchlab/common.hpp"
#include "quenchlab/entropy.hpp"
#include "quenchlab/io.hpp"
#include "quenchlab/laws.hpp"
#include "quenchlab/mc/conv_tail.hpp"
#include "quenchlab/mc/core_lemma.hpp"
#include "quenchlab/mc/ergodic.hpp"
#include "quenchlab/mc/quenched.hpp"
#include "quenchlab/mc/waiting_time.hpp"
#include "quenchlab/psi.hpp"
#include "quenchlab/rate.hpp"
#include "quenchlab/rng.hpp"
#include "quenchlab/words.hpp"
