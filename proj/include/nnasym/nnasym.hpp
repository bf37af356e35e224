// Copyright 2026 The nnasym Authors
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

#include "nnasym/commands.hpp"
#include "nnasym/config.hpp"
#include "nnasym/data.hpp"
#include "nnasym/errors.hpp"
#include "nnasym/experiment.hpp"
#include "nnasym/fit.hpp"
#include "nnasym/io.hpp"
#include "nnasym/limitset/basis.hpp"
#include "nnasym/limitset/delta.hpp"
#include "nnasym/limitset/direction.hpp"
#include "nnasym/limitset/partitions.hpp"
#include "nnasym/limitset/realize.hpp"
#include "nnasym/limitset/simulate.hpp"
#include "nnasym/model.hpp"
#include "nnasym/parallel.hpp"
#include "nnasym/rng.hpp"
#include "nnasym/statistic.hpp"
#include "nnasym/verify.hpp"
