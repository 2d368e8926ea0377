#pragma once

#include <stdexcept>
#include <string>

namespace recabs {

/// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// scheme construction
struct CyclicDriveGraph : Error { using Error::Error; };
struct DisconnectedDriveGraph : Error { using Error::Error; };
struct MissingProbe : Error { using Error::Error; };
struct BadBranching : Error { using Error::Error; };
struct UnknownKind : Error { using Error::Error; };
struct NonPhysicalParams : Error { using Error::Error; };

// liouville
struct SingularLiouvillian : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };
struct ZeroProbe : Error { using Error::Error; };
struct NumericalViolation : Error { using Error::Error; };

// ensemble / recovery
struct BadGridParams : Error { using Error::Error; };
struct BadProfile : Error { using Error::Error; };
struct EmptyWindow : Error { using Error::Error; };
struct NoWindowFound : Error { using Error::Error; };
struct NonPositiveInput : Error { using Error::Error; };
struct NonPositiveEta : Error { using Error::Error; };

// optimize
struct UnknownFigure : Error { using Error::Error; };
struct BadSweepSpec : Error { using Error::Error; };

// cli
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

}  // namespace recabs
