#include "hipose/error.hpp"

namespace hipose {

SolverError::SolverError(const std::string& what, int iteration)
    : Error(what), iteration_(iteration) {}

}  // namespace hipose
