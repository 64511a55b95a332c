#include "gedsv/errors.hpp"

#include <sstream>

namespace gedsv {

namespace {

std::string describe_filter_failure(std::size_t t, double shape, double rate, double y) {
    std::ostringstream os;
    os.precision(17);
    os << "filter left the finite range at t=" << t << " (shape=" << shape << ", rate=" << rate
       << ", y=" << y << ")";
    return os.str();
}

std::string describe_input_error(const std::string& what, std::size_t line) {
    if (line == 0) return what;
    return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

FilterFailure::FilterFailure(std::size_t t_, double shape_, double rate_, double y_)
    : NumericFailure(describe_filter_failure(t_, shape_, rate_, y_)),
      t(t_),
      shape(shape_),
      rate(rate_),
      y(y_) {}

InputError::InputError(const std::string& what, std::size_t line_)
    : std::runtime_error(describe_input_error(what, line_)), line(line_) {}

}  // namespace gedsv
