#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "otcimpact/domain.hpp"
#include "otcimpact/propagator.hpp"

namespace otcimpact {

std::string_view tool_version();

/// Shortest round-trip text of x rounded to 15 significant digits; "nan",
/// "inf" and "-inf" for non-finite values.
std::string format_real(double x);
/// x rounded to 15 significant digits.
double round_real(double x);

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

/// Identifies the run that produced an output file.
struct OutputMeta {
  std::string command;
  std::string config_hash;
  std::optional<std::uint64_t> seed;
};

/// "# otcimpact <version> command=<c> config_hash=<h> seed=<s>"
std::string csv_meta_line(const OutputMeta& meta);

// CSV writers. Each starts with the metadata comment line when meta is given;
// readers in ingest skip it.
void write_trades_csv(std::ostream& out, std::span<const Trade> trades,
                      const OutputMeta* meta = nullptr);
void write_quotes_csv(std::ostream& out, std::span<const Quote> quotes,
                      const OutputMeta* meta = nullptr);
/// lag,value,count
void write_curve_csv(std::ostream& out, const LagCurve& curve, const OutputMeta* meta = nullptr);
/// lag,g,G
void write_kernel_csv(std::ostream& out, const KernelSolution& kernel,
                      const OutputMeta* meta = nullptr);

/// Reads a lag,value[,count] table as written by write_curve_csv. Lags must
/// run 0, 1, 2, ... without gaps.
LagCurve read_curve_csv(std::istream& in, CurveKind kind);
LagCurve read_curve_csv(const std::filesystem::path& path, CurveKind kind);

/// Writes the whole file or throws IO_ERROR.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace otcimpact
