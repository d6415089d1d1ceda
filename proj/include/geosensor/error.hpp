#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geosensor {

enum class ErrorKind {
  MissingFile,
  SchemaError,
  BadCoordinate,
  EmptyField,
  DuplicateYear,
  NegativeValue,
  NoData,
  NoCentroid,
  UnknownPaperId,
  EndpointUnreachable,
  MalformedResponse,
  Separation,
  SingularInformation,
  AllZeroResponse,
  InvalidArgument,
  MissingGeometry,
  MalformedBoundaries,
  Validation,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable kind. Every failure the library
/// reports goes through this type so callers can branch on `kind()`.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace geosensor
