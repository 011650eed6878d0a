#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace spdemax::csv {

/// Shortest decimal representation that round-trips to the same double;
/// locale-independent.
std::string format_double(double v);

/// Minimal CSV emitter: header row then typed cells. Numeric cells use the
/// shortest round-trip format so reruns are byte-identical.
class Writer {
 public:
  Writer(const std::string& path, const std::vector<std::string>& header);

  Writer& cell(double v);
  Writer& cell(std::int64_t v);
  Writer& cell(std::size_t v);
  Writer& cell(const std::string& v);
  void end_row();

  bool good() const { return out_.good(); }

 private:
  std::ofstream out_;
  bool row_open_ = false;
  void sep();
};

}  // namespace spdemax::csv
