#pragma once

#include <stdexcept>
#include <string>

namespace zvl {

enum class Errc {
    DuplicateVertex,
    UnknownEndpoint,
    SelfLoop,
    NonPositiveLength,
    DuplicateEdge,
    Disconnected,
    UnknownVertex,
    EmptySet,
    EmptyProfile,
    NotSubsetOfZ,
    AmbiguousRoot,
    MissingNestedPartition,
    ParetoZEmpty,
    WeightedWithoutOverride,
    NotATree,
    NotABlockGraph,
    InvalidOrder,
    InvalidParameters,
    SearchSpaceTooLarge,
    BudgetExceeded,
    UnknownBallot,
    ParseError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace zvl
