// Copyright 2026 The hcglad Authors
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

#include "hcglad/config.hpp"
#include "hcglad/contrast.hpp"
#include "hcglad/encoders.hpp"
#include "hcglad/error.hpp"
#include "hcglad/gradcheck.hpp"
#include "hcglad/graph_io.hpp"
#include "hcglad/hyperbolicity.hpp"
#include "hcglad/lorentz.hpp"
#include "hcglad/motif_hypergraph.hpp"
#include "hcglad/pipeline.hpp"
#include "hcglad/random.hpp"
#include "hcglad/report_io.hpp"
#include "hcglad/snapshot.hpp"
#include "hcglad/tensor.hpp"
#include "hcglad/trainer.hpp"
#include "hcglad/views.hpp"
