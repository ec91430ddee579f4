#pragma once

#include <stdexcept>
#include <string>

namespace aglab {

enum class Errc {
  alphabet_violation,
  normalization,
  codec,
  impossible_history,
  parameter,
  index,
  degenerate_value,
  spec_match,
  non_unique_stationary,
  undefined_period,
  empty_input,
  syntax,
  interpretation,
  kind,
  resource_cap,
  io,
};

/// Library-wide exception carrying a machine-checkable error class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace aglab
