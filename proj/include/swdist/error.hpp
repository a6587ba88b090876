#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swdist {

/// Classifies input/contract violations. Every kind is a caller-side error;
/// the CLI maps all of them to exit code 2.
enum class ErrorKind {
  Format,     // malformed file header or unsupported encoding
  Shape,      // wrong rank or mismatched dimensions
  Data,       // non-finite or out-of-range values
  Arity,      // too few samples / mismatched lengths
  Capacity,   // requested more draws than available
  Write,      // output could not be written
  Dimension,  // zero dimension
  Domain,     // parameters outside a formula's domain
  Input,      // generic invalid argument
  Bandwidth,  // degenerate kernel bandwidth
  Coverage,   // incomplete grid or missing condition
  Undefined,  // statistic undefined for the input (e.g. constant list)
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Data: return "data";
    case ErrorKind::Arity: return "arity";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Write: return "write";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Input: return "input";
    case ErrorKind::Bandwidth: return "bandwidth";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::Undefined: return "undefined";
  }
  return "unknown";
}

}  // namespace swdist
