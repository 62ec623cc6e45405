#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tioa {

// Error carrying the machine-readable fields the command line reports:
// a kind (parse, schema, validation, query, precondition, size_guard,
// oracle_disagreement), a human-readable detail, and where it happened.
class kit_error : public std::runtime_error {
 public:
  kit_error(std::string kind, std::string detail, std::string location = "")
      : std::runtime_error(detail),
        kind_(std::move(kind)),
        detail_(std::move(detail)),
        location_(std::move(location)) {}

  const std::string& kind() const { return kind_; }
  const std::string& detail() const { return detail_; }
  const std::string& location() const { return location_; }

 private:
  std::string kind_;
  std::string detail_;
  std::string location_;
};

}  // namespace tioa
