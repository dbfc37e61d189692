#ifndef BDARMA_ERRORS_HPP
#define BDARMA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bdarma {

// Bad configuration or API usage. CLI exit code 2.
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid data values (zeros, negative components, malformed rows). CLI exit code 3.
class data_error : public std::runtime_error {
  public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure that survived all retries. CLI exit code 4.
class numeric_error : public std::runtime_error {
  public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bdarma

#endif
