#include "spdemax/report.hpp"

#include <charconv>
#include <cstdio>

namespace spdemax {

namespace {
std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::scientific, 6);
  return std::string(buf, res.ptr);
}
}  // namespace

std::string Report::to_line() const {
  std::string line = "CHECK " + check_name;
  line += " verdict=";
  line += pass ? "pass" : "fail";
  line += " max_violation=" + fmt_double(max_violation);
  if (location) {
    line += " at=(" + fmt_double(location->first) + "," +
            fmt_double(location->second) + ")";
  } else {
    line += " at=none";
  }
  line += " tol=" + fmt_double(tolerance);
  if (!context.empty()) line += " context=" + context;
  return line;
}

Report make_report(std::string name, double max_violation, double tolerance,
                   std::optional<std::pair<double, double>> location,
                   std::string context) {
  Report r;
  r.check_name = std::move(name);
  r.max_violation = max_violation;
  r.tolerance = tolerance;
  r.pass = max_violation <= tolerance;
  r.location = location;
  r.context = std::move(context);
  return r;
}

}  // namespace spdemax
