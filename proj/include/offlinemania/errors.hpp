#pragma once

#include <stdexcept>
#include <string>

namespace omania {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error { public: using Error::Error; };
class GeometryError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

// Env misuse.
class EpisodeOver : public Error { public: using Error::Error; };
class LengthMismatch : public Error { public: using Error::Error; };

// Dataset container and tooling.
class IOError : public Error { public: using Error::Error; };
class FormatError : public Error { public: using Error::Error; };
class TruncationError : public FormatError { public: using FormatError::FormatError; };
class DimensionError : public FormatError { public: using FormatError::FormatError; };
class InsufficientData : public Error { public: using Error::Error; };
class RatioError : public Error { public: using Error::Error; };

class UnknownPolicy : public Error { public: using Error::Error; };

}  // namespace omania
