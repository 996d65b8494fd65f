#pragma once

#include <string>

#include "specforge/service.hpp"

namespace specforge::service {

// Blocks until the listener stops. Throws IoError when the port cannot be bound.
void serve(Service& service, const std::string& host, int port);

}  // namespace specforge::service
