#include "spdemax/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace spdemax::csv {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Writer::Writer(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("csv::Writer: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void Writer::sep() {
  if (row_open_) out_ << ',';
  row_open_ = true;
}

Writer& Writer::cell(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

Writer& Writer::cell(std::int64_t v) {
  sep();
  out_ << v;
  return *this;
}

Writer& Writer::cell(std::size_t v) {
  sep();
  out_ << v;
  return *this;
}

Writer& Writer::cell(const std::string& v) {
  sep();
  out_ << v;
  return *this;
}

void Writer::end_row() {
  out_ << '\n';
  row_open_ = false;
}

}  // namespace spdemax::csv
