#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pathcause/harness.hpp"

namespace pathcause::harness {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string& why) {
  throw InputError("line " + std::to_string(line_no) + ": " + why);
}

Symbol parse_bit(const std::string& s, std::size_t line_no, const char* column) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  bad_line(line_no, std::string("column ") + column + " must be 0 or 1, got '" + s + "'");
}

double parse_double(const std::string& s, std::size_t line_no, const char* column) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return kInfiniteBits;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad_line(line_no, std::string("column ") + column + " is not a number: '" + s + "'");
  }
}

std::size_t parse_index(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    bad_line(line_no, "round index is not an integer: '" + s + "'");
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_sequences(std::ostream& out, const Sequences& seq, const std::optional<ProcessParams>& model) {
  const bool side = !seq.z.empty();
  out << "i,x,y" << (side ? ",z" : "") << ",regime\n";
  for (std::size_t i = 0; i < seq.x.size(); ++i) {
    out << (i + 1) << ',' << int(seq.x[i]) << ',' << int(seq.y[i]);
    if (side) out << ',' << int(seq.z[i]);
    out << ',' << (model ? model->regime_at(i + 1) : 1) << '\n';
  }
}

Sequences read_sequences(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("line 1: missing header");
  const auto header = split_csv(strip_cr(line));
  int col_x = -1, col_y = -1, col_z = -1, col_i = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "x") col_x = int(c);
    if (header[c] == "y") col_y = int(c);
    if (header[c] == "z") col_z = int(c);
    if (header[c] == "i") col_i = int(c);
  }
  if (col_x < 0 || col_y < 0) bad_line(1, "header must contain x and y columns");

  Sequences seq;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      bad_line(line_no, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    }
    if (col_i >= 0 && parse_index(f[col_i], line_no) != seq.x.size() + 1) {
      bad_line(line_no, "round index out of sequence");
    }
    seq.x.push_back(parse_bit(f[col_x], line_no, "x"));
    seq.y.push_back(parse_bit(f[col_y], line_no, "y"));
    if (col_z >= 0) seq.z.push_back(parse_bit(f[col_z], line_no, "z"));
  }
  if (seq.x.empty()) throw InputError("sequence file has no rows");
  return seq;
}

Sequences read_sequences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return read_sequences(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& rows, Format format) {
  if (format == Format::kCsv) {
    out << kTraceHeader << '\n';
    for (const auto& r : rows) {
      out << r.i << ',' << int(r.x) << ',' << int(r.y) << ',' << format_number(r.c_true) << ','
          << format_number(r.c_star) << ',' << format_number(r.c_hat) << ',' << format_number(r.f_c_hat)
          << ',' << format_number(r.f_r_hat) << ',' << r.regime << '\n';
    }
    return;
  }
  // JSON: numbers pass through the same 12-digit formatting so both formats
  // carry identical values.
  auto num = [](double v) -> nlohmann::json {
    if (!std::isfinite(v)) return format_number(v);
    return nlohmann::json::parse(format_number(v));
  };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"i", r.i},
                   {"x", int(r.x)},
                   {"y", int(r.y)},
                   {"C_true", num(r.c_true)},
                   {"C_star", num(r.c_star)},
                   {"C_hat", num(r.c_hat)},
                   {"f_c_hat", num(r.f_c_hat)},
                   {"f_r_hat", num(r.f_r_hat)},
                   {"regime", r.regime}});
  }
  out << arr.dump(1) << '\n';
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("line 1: missing header");
  if (strip_cr(line) != kTraceHeader) bad_line(1, std::string("expected header '") + kTraceHeader + "'");
  std::vector<TraceRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 9) bad_line(line_no, "expected 9 fields, got " + std::to_string(f.size()));
    TraceRecord r;
    r.i = parse_index(f[0], line_no);
    if (r.i != rows.size() + 1) bad_line(line_no, "round index out of sequence");
    r.x = parse_bit(f[1], line_no, "x");
    r.y = parse_bit(f[2], line_no, "y");
    r.c_true = parse_double(f[3], line_no, "C_true");
    r.c_star = parse_double(f[4], line_no, "C_star");
    r.c_hat = parse_double(f[5], line_no, "C_hat");
    r.f_c_hat = parse_double(f[6], line_no, "f_c_hat");
    r.f_r_hat = parse_double(f[7], line_no, "f_r_hat");
    r.regime = static_cast<int>(parse_index(f[8], line_no));
    rows.push_back(r);
  }
  if (rows.empty()) throw InputError("trace file has no rows");
  return rows;
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return read_trace_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace pathcause::harness
