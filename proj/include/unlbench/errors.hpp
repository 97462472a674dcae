#ifndef UNLBENCH_ERRORS_HPP
#define UNLBENCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace unlbench {

// Invalid user-supplied configuration (bad spec, bad target, malformed
// config document). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A metric that is mathematically undefined for the given input, e.g.
// accuracy over an empty example set. Never silently coerced to a number.
class MetricError : public std::runtime_error {
  public:
    explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

// Failure inside one sweep cell; carries the failing cell's identity.
// Maps to CLI exit code 1.
class CellError : public std::runtime_error {
  public:
    CellError(std::string method, int i, int j, const std::string& cause)
        : std::runtime_error("cell (method=" + method + ", i=" + std::to_string(i) +
                             ", j=" + std::to_string(j) + ") failed: " + cause),
          method_(std::move(method)),
          i_(i),
          j_(j) {}

    const std::string& method() const { return method_; }
    int train_index() const { return i_; }
    int unlearn_index() const { return j_; }

  private:
    std::string method_;
    int i_;
    int j_;
};

}  // namespace unlbench

#endif
