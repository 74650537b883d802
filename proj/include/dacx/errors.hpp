#pragma once

#include <stdexcept>
#include <string>

namespace dacx {

// Error taxonomy shared by the library and the CLI. The CLI maps each class
// to a distinct exit code (see tools/dacx_main.cpp and --help).
enum class errc {
    schema = 2,  // malformed problem files, bad configuration
    domain = 3,  // precondition violations, out-of-validity evaluation
    numeric = 4, // nonconvergence, overflow, lost accuracy
};

class error : public std::runtime_error {
  public:
    error(errc code, const std::string &what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

struct schema_error : error {
    explicit schema_error(const std::string &w) : error(errc::schema, w) {}
};
struct domain_error : error {
    explicit domain_error(const std::string &w) : error(errc::domain, w) {}
};
struct numeric_error : error {
    explicit numeric_error(const std::string &w) : error(errc::numeric, w) {}
};

} // namespace dacx
