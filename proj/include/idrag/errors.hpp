#pragma once

#include <stdexcept>
#include <string>

namespace idrag {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct UnknownNode : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct MissingEmbedding : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };
struct GatewayError : Error { using Error::Error; };
struct ContextOverflow : Error { using Error::Error; };
struct TimestampRegression : Error { using Error::Error; };
struct MissingChronicle : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };
struct JudgeParseError : Error { using Error::Error; };
struct MissingFixture : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

} // namespace idrag
