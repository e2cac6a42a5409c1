// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "sprawl/graph.hpp"

namespace sprawl {

/// Line-oriented text container: header "SPRAWL 1", then metric, payloads,
/// regions (foci, coefficients, radii, typed edges), roots and an optional
/// distance table. Doubles use the shortest round-trip representation, so
/// equal graphs serialize to identical bytes.
std::string serialize(const SprawlGraph& g);

/// Parses and validates. Malformed input throws ErrorCode::Parse; a graph
/// that parses but fails validation throws ErrorCode::InvalidState unless
/// `require_valid` is false, in which case it comes back unvalidated.
SprawlGraph deserialize(std::string_view text, bool require_valid = true);

void save_index(const SprawlGraph& g, const std::string& path);
SprawlGraph load_index(const std::string& path, bool require_valid = true);

}  // namespace sprawl
