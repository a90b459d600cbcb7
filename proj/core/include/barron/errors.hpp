#pragma once

#include <stdexcept>
#include <string>

namespace barron {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error { using Error::Error; };        // dimension mismatch
class ParameterError : public Error { using Error::Error; };    // out-of-domain argument
class SpecError : public Error { using Error::Error; };         // malformed classifier spec
class FormatError : public Error { using Error::Error; };       // bad file contents
class SizeError : public Error { using Error::Error; };         // request larger than source
class ConfigError : public Error { using Error::Error; };
class FitError : public Error { using Error::Error; };          // too few points for a regression
class CalibrationError : public Error { using Error::Error; };
class TrainingError : public Error { using Error::Error; };     // non-finite loss
class OverflowError : public Error { using Error::Error; };

// Thrown by tube_gate when the interval is too short for the plateau.
class DegenerateRectangle : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

}  // namespace barron
