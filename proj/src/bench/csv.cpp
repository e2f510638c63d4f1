#include <lrexp/bench.hpp>

#include <cinttypes>
#include <cstdio>

namespace lrexp::bench {

namespace {

std::string fmt_double(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

template <typename T>
std::string fmt_int(const std::optional<T>& v) {
  if (!v) return "";
  return std::to_string(*v);
}

// Names never contain separators in practice; quote defensively anyway.
std::string fmt_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string format_row(const RunRecord& r) {
  std::string line;
  line += fmt_text(r.experiment) + ",";
  line += fmt_text(r.method) + ",";
  line += std::to_string(r.n) + ",";
  line += fmt_int(r.rank) + ",";
  line += fmt_double(r.tol) + ",";
  line += fmt_double(r.h) + ",";
  line += fmt_text(r.variant) + ",";
  line += fmt_int(r.k) + ",";
  line += fmt_double(r.c2) + ",";
  line += fmt_int(r.seed) + ",";
  line += fmt_double(r.error_rel) + ",";
  line += fmt_double(r.order) + ",";
  line += fmt_double(r.runtime_s);
  return line;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) {
  bool fresh = true;
  if (std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != kCsvHeader) {
      throw ConfigError("existing CSV " + path.string() + " has a different header");
    }
    fresh = false;
  }
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  out_.open(path, std::ios::app);
  if (!out_) {
    throw ConfigError("cannot open " + path.string() + " for writing");
  }
  if (fresh) {
    out_ << kCsvHeader << '\n';
  }
}

void CsvWriter::write(const RunRecord& r) { write_line(format_row(r)); }

void CsvWriter::write_line(const std::string& line) {
  out_ << line << '\n';
  out_.flush();
}

}  // namespace lrexp::bench
