// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include "slotnoc/core_model.hpp"

namespace slotnoc {

// Transmission over computation time; above 1 the traffic bounds the tile.
// Throws ZeroCompute when computation_slots is not positive.
double bounded_ratio(Slot transmission_slots, Slot computation_slots);

inline bool communication_bound(double ratio) { return ratio > 1.0; }

}  // namespace slotnoc
