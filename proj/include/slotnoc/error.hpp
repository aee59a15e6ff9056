// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: © 2026 The slotnoc Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slotnoc {

enum class ErrorKind {
    NonAdjacentHop,
    CapacityExceeded,
    DanglingUpstream,
    InvalidWorkload,
    ParseError,
    UnreachableTerminal,
    MalformedHeader,
    TableOverflow,
    HeaderOverflow,
    RuntimeConflict,
    DeadlockDetected,
    ZeroCompute,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without string matching.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    // Same kind, message prefixed with where it happened.
    Error within(const std::string &context) const { return Error(kind_, context + ": " + what(), Raw{}); }

   private:
    struct Raw {};
    Error(ErrorKind kind, const std::string &message, Raw) : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind_;
};

}  // namespace slotnoc
