#include "otcimpact/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#ifndef OTCIMPACT_VERSION
#define OTCIMPACT_VERSION "0.0.0"
#endif

namespace otcimpact {

std::string_view tool_version() { return OTCIMPACT_VERSION; }

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 15);
  // Reparse and print the shortest form so 0.1 stays "0.1".
  double rounded = 0.0;
  std::from_chars(buf, res.ptr, rounded);
  if (rounded == 0.0) rounded = 0.0;  // no "-0"
  res = std::to_chars(buf, buf + sizeof buf, rounded);
  return std::string(buf, res.ptr);
}

double round_real(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 15);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out == 0.0 ? 0.0 : out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string csv_meta_line(const OutputMeta& meta) {
  std::string line = "# otcimpact " + std::string(tool_version()) + " command=" + meta.command +
                     " config_hash=" + meta.config_hash + " seed=";
  line += meta.seed ? std::to_string(*meta.seed) : "none";
  return line;
}

namespace {

void put_meta(std::ostream& out, const OutputMeta* meta) {
  if (meta) out << csv_meta_line(*meta) << '\n';
}

}  // namespace

void write_trades_csv(std::ostream& out, std::span<const Trade> trades, const OutputMeta* meta) {
  put_meta(out, meta);
  out << "ts_ns,product,spread_bps,notional,venue,true_sign\n";
  for (const auto& t : trades) {
    out << t.ts << ',' << t.product << ',' << format_real(t.spread) << ','
        << format_real(t.notional) << ',' << to_string(t.venue) << ',';
    if (t.true_sign) out << static_cast<int>(*t.true_sign);
    out << '\n';
  }
}

void write_quotes_csv(std::ostream& out, std::span<const Quote> quotes, const OutputMeta* meta) {
  put_meta(out, meta);
  out << "ts_ns,product,spread_bps\n";
  for (const auto& q : quotes) {
    out << q.ts << ',' << q.product << ',' << format_real(q.spread) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const LagCurve& curve, const OutputMeta* meta) {
  put_meta(out, meta);
  out << "lag,value,count\n";
  for (std::size_t l = 0; l < curve.values.size(); ++l) {
    out << l << ',' << format_real(curve.values[l]) << ','
        << (l < curve.counts.size() ? curve.counts[l] : 0) << '\n';
  }
}

void write_kernel_csv(std::ostream& out, const KernelSolution& kernel, const OutputMeta* meta) {
  put_meta(out, meta);
  out << "lag,g,G\n";
  for (std::size_t l = 0; l < kernel.G.values.size(); ++l) {
    const double g = l < kernel.g.size() ? kernel.g[l] : 0.0;
    out << l << ',' << format_real(g) << ',' << format_real(kernel.G.values[l]) << '\n';
  }
}

LagCurve read_curve_csv(std::istream& in, CurveKind kind) {
  std::string line;
  long line_no = 0;
  int lag_col = -1, value_col = -1, count_col = -1;
  auto split = [](const std::string& s) {
    std::vector<std::string> cols;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(0, 1);
      cols.push_back(cell);
    }
    return cols;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto cols = split(line);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == "lag") lag_col = static_cast<int>(i);
      if (cols[i] == "value") value_col = static_cast<int>(i);
      if (cols[i] == "count") count_col = static_cast<int>(i);
    }
    break;
  }
  if (line_no == 0) throw Error(ErrorCode::kEmptyFile, "no header row");
  if (lag_col < 0) throw Error(ErrorCode::kSchemaMismatch, "missing column 'lag'", "lag");
  if (value_col < 0) throw Error(ErrorCode::kSchemaMismatch, "missing column 'value'", "value");

  LagCurve curve;
  curve.kind = kind;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto cols = split(line);
    auto cell = [&](int col, const char* name) -> const std::string& {
      if (col >= static_cast<int>(cols.size())) {
        throw Error(ErrorCode::kParseError, std::string("missing ") + name, name, line_no);
      }
      return cols[static_cast<std::size_t>(col)];
    };
    auto parse_int = [&](const std::string& s, const char* name) {
      std::int64_t v = 0;
      auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::kParseError, std::string("bad ") + name + " '" + s + "'", name,
                    line_no);
      }
      return v;
    };
    const auto lag = parse_int(cell(lag_col, "lag"), "lag");
    if (lag != static_cast<std::int64_t>(curve.values.size())) {
      throw Error(ErrorCode::kParseError, "lags must run 0, 1, 2, ... without gaps", "lag",
                  line_no);
    }
    const auto& vs = cell(value_col, "value");
    double v = 0.0;
    auto r = std::from_chars(vs.data(), vs.data() + vs.size(), v);
    if (r.ec != std::errc() || r.ptr != vs.data() + vs.size()) {
      throw Error(ErrorCode::kParseError, "bad value '" + vs + "'", "value", line_no);
    }
    curve.values.push_back(v);
    curve.counts.push_back(count_col >= 0 ? parse_int(cell(count_col, "count"), "count") : 0);
  }
  if (curve.values.empty()) throw Error(ErrorCode::kEmptyInput, "curve has no rows");
  return curve;
}

LagCurve read_curve_csv(const std::filesystem::path& path, CurveKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string(), path.string());
  return read_curve_csv(in, kind);
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string(), path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string(), path.string());
}

}  // namespace otcimpact
