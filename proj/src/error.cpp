#include "archsearch/error.hpp"

namespace archsearch {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArchitecture: return "invalid architecture";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::InvalidLabel: return "invalid label";
    case ErrorKind::InvalidConfig: return "invalid config";
    case ErrorKind::Precondition: return "precondition violated";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::InvalidDataset: return "invalid dataset";
    case ErrorKind::InvalidSplit: return "invalid split";
  }
  return "error";
}

}  // namespace archsearch
