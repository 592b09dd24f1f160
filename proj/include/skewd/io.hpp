#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "skewd/datagen.hpp"

namespace skewd {

struct XYData {
  std::vector<double> x;
  std::vector<double> y;
};

/// Two numeric columns separated by commas. A first line without any
/// numeric field is treated as a header. Throws ParseError (with the 1-based
/// line number) on malformed rows.
XYData read_xy_csv(std::istream& in);
XYData read_xy_csv(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

/// Header `x,y`, one row per observation, LF line endings.
void write_xy_csv(std::ostream& out, const std::vector<double>& x, const std::vector<double>& y);
void write_xy_csv(const std::filesystem::path& path, const std::vector<double>& x,
                  const std::vector<double>& y);

/// Sidecar record: spec, seed, mechanism parameters and the true direction.
nlohmann::json pair_metadata(const LabeledPair& pair, const std::string& pair_id,
                             const std::string& dataset);

/// Throws ParseError when the record lacks a readable true direction.
Direction truth_from_metadata(const nlohmann::json& meta);

/// Writes text to a file, throwing Error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Number of worker threads: `requested` if positive, else SKEWD_THREADS,
/// else the hardware concurrency (at least 1).
unsigned resolve_jobs(int requested);

/// Runs task(0..count-1) on up to `jobs` threads. Tasks must write only to
/// their own slots; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task);

}  // namespace skewd
