#pragma once

#include <stdexcept>
#include <string>

namespace hiertax {

// Error with a stable machine-parseable code plus a human detail message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace hiertax
