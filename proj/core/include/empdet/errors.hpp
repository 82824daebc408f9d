#pragma once

#include <stdexcept>
#include <string>

namespace empdet {

// Bad configuration or malformed/missing input file. The CLI maps this to
// exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// An artifact a stage depends on has not been produced yet. Exit code 3.
class UpstreamMissing : public std::runtime_error {
 public:
  explicit UpstreamMissing(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace empdet
