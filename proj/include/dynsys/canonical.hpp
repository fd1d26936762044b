#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dynsys {

/// AHU string encoding of an unordered rooted tree: a leaf is "()", an
/// internal node wraps the sorted concatenation of its children's encodings.
/// Equal encodings <=> isomorphic rooted trees.
///
/// A node whose child enumeration was cut off by a cap contributes the
/// distinct pseudo-child atom "[T]" (sorted among the real children), so a
/// cap-truncated region can never compare equal to a complete one. Nodes at
/// the comparison depth are ordinary leaves: depth is part of the agreed
/// scope, caps are not.
std::string ahu_encode(const std::vector<std::vector<std::uint32_t>>& children,
                       std::uint32_t root, const std::vector<bool>& cap_truncated);

std::string ahu_encode(const std::vector<std::vector<std::uint32_t>>& children,
                       std::uint32_t root);

inline constexpr const char* kTruncatedAtom = "[T]";

}  // namespace dynsys
