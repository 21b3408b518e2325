#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnbar {

// error categories, aligned with the CLI exit codes
enum class errc { ok = 0, bad_input = 1, refused = 2, numeric = 3 };

struct error : std::runtime_error {
  errc code;
  error(errc c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

// malformed arguments or data: negative counts, parameters out of domain
struct input_error : error {
  explicit input_error(const std::string& msg) : error(errc::bad_input, msg) {}
};

// well formed request the model cannot honor, e.g. simulating a
// non-stationary specification or asking for an undefined moment
struct refusal_error : error {
  explicit refusal_error(const std::string& msg) : error(errc::refused, msg) {}
};

struct numeric_error : error {
  explicit numeric_error(const std::string& msg) : error(errc::numeric, msg) {}
};

// likelihood recursion produced a non-finite term at time index t
struct filter_error : numeric_error {
  std::size_t t;
  filter_error(std::size_t t_, const std::string& msg) : numeric_error(msg), t(t_) {}
};

// a tail walk hit its cap before reaching the requested mass
struct truncation_error : numeric_error {
  long long y_reached;
  double mass_reached;
  truncation_error(long long y, double mass, const std::string& msg)
      : numeric_error(msg), y_reached(y), mass_reached(mass) {}
};

}  // namespace bnbar
