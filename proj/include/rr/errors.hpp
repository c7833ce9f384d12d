#pragma once
#include <stdexcept>
#include <string>

namespace rr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated precondition of an operation (bad arguments).
struct PreconditionError : Error {
  using Error::Error;
};

struct MissingTerm : Error {
  explicit MissingTerm(unsigned long long idx)
      : Error("term index " + std::to_string(idx) + " is beyond the file-backed prefix and no tail rule is set"),
        index(idx) {}
  unsigned long long index;
};

struct StarvedSign : Error {
  StarvedSign(const std::string& sign, unsigned long long from)
      : Error("no " + sign + " term found after index " + std::to_string(from) + " within the scan limit"),
        sign_name(sign) {}
  std::string sign_name;
};

struct Infeasible : Error {
  using Error::Error;
};

struct Refused : Error {
  using Error::Error;
};

}  // namespace rr
