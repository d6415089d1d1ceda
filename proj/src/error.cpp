#include "geosensor/error.hpp"

namespace geosensor {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::BadCoordinate: return "BadCoordinate";
    case ErrorKind::EmptyField: return "EmptyField";
    case ErrorKind::DuplicateYear: return "DuplicateYear";
    case ErrorKind::NegativeValue: return "NegativeValue";
    case ErrorKind::NoData: return "NoData";
    case ErrorKind::NoCentroid: return "NoCentroid";
    case ErrorKind::UnknownPaperId: return "UnknownPaperId";
    case ErrorKind::EndpointUnreachable: return "EndpointUnreachable";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::Separation: return "Separation";
    case ErrorKind::SingularInformation: return "SingularInformation";
    case ErrorKind::AllZeroResponse: return "AllZeroResponse";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MissingGeometry: return "MissingGeometry";
    case ErrorKind::MalformedBoundaries: return "MalformedBoundaries";
    case ErrorKind::Validation: return "Validation";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace geosensor
