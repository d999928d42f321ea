#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semsyn {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// The formula lies outside the fragment the automaton construction handles.
class UnsupportedError : public std::runtime_error {
 public:
  UnsupportedError(const std::string& formula, const std::string& offending)
      : std::runtime_error("unsupported formula " + formula + ": cannot handle subformula " + offending),
        offending_(offending) {}
  const std::string& offending() const { return offending_; }

 private:
  std::string offending_;
};

/// A configured budget (nodes, recursion, abstraction size) was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semsyn
