#pragma once

#include <stdexcept>
#include <string>

namespace slse {

// Error categories, aligned with the C API status codes.
enum class errc : int {
    invalid = 1,  // shape mismatch, bad argument
    config  = 2,  // infeasible or inconsistent configuration
    numeric = 3,  // singularity, divergence, breakdown
    io      = 4,  // file read/write failure
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

struct dim_error : error {
    explicit dim_error(const std::string& what) : error(errc::invalid, what) {}
};

struct config_error : error {
    explicit config_error(const std::string& what) : error(errc::config, what) {}
};

struct singular_error : error {
    explicit singular_error(const std::string& what) : error(errc::numeric, what) {}
};

struct numeric_error : error {
    explicit numeric_error(const std::string& what) : error(errc::numeric, what) {}
};

struct io_error : error {
    explicit io_error(const std::string& what) : error(errc::io, what) {}
};

}  // namespace slse
