#pragma once

#include <stdexcept>
#include <string>

namespace msfno {

/// Bad experiment/model configuration (CLI exit code 2).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Missing or malformed dataset/checkpoint files (CLI exit code 3).
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: singular systems, non-finite gradients (CLI exit code 4).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace msfno
