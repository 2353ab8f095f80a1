// Copyright 2026 The topoinpaint Authors.
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

#include "topoinpaint/bessel.hpp"
#include "topoinpaint/codec.hpp"
#include "topoinpaint/criterion.hpp"
#include "topoinpaint/experiment.hpp"
#include "topoinpaint/grid.hpp"
#include "topoinpaint/netpbm.hpp"
#include "topoinpaint/oracle.hpp"
#include "topoinpaint/parallel.hpp"
#include "topoinpaint/select.hpp"
#include "topoinpaint/solver.hpp"
#include "topoinpaint/synthetic.hpp"
