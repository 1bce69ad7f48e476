// SPDX-License-Identifier: Apache-2.0

#ifndef OMIMO_VERSION_HPP
#define OMIMO_VERSION_HPP

namespace omimo {

inline constexpr const char* tool_version = "0.1.0";

}  // namespace omimo

#endif  // OMIMO_VERSION_HPP
