/*
 * Copyright 2026 The Skintone Audit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Umbrella header.

#ifndef SKINTONE_SKINTONE_HPP_
#define SKINTONE_SKINTONE_HPP_

#include "skintone/audit.hpp"
#include "skintone/colorimetry.hpp"
#include "skintone/config.hpp"
#include "skintone/csv.hpp"
#include "skintone/error.hpp"
#include "skintone/fairness.hpp"
#include "skintone/fairness_io.hpp"
#include "skintone/image.hpp"
#include "skintone/image_io.hpp"
#include "skintone/ita.hpp"
#include "skintone/parallel.hpp"
#include "skintone/seg_eval.hpp"
#include "skintone/stats.hpp"
#include "skintone/svg.hpp"
#include "skintone/synth.hpp"
#include "skintone/version.hpp"

#endif  // SKINTONE_SKINTONE_HPP_
