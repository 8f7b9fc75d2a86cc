#pragma once

#include <stdexcept>
#include <string>

namespace morphsweep {

// Root of every error the library throws. The CLI maps config_error to exit
// code 1 and everything else to exit code 2.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (bad ranges, unknown model name, ...).
class config_error : public error {
public:
    using error::error;
};

class invalid_radius : public config_error {
public:
    using config_error::config_error;
};

// A state component became NaN or infinite during integration.
class numerical_divergence : public error {
public:
    using error::error;
};

class dimension_mismatch : public error {
public:
    using error::error;
};

// Resume attempted with a configuration that differs from the manifest.
class checksum_mismatch : public error {
public:
    using error::error;
};

class missing_matrix_dump : public error {
public:
    using error::error;
};

class parse_error : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

}  // namespace morphsweep
