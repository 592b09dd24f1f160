#include "skewd/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "skewd/error.hpp"

namespace skewd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

nlohmann::json sigmoid_json(const Sigmoid& s) { return {{"a", s.a}, {"b", s.b}, {"c", s.c}}; }

}  // namespace

XYData read_xy_csv(std::istream& in) {
  XYData data;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 2) throw ParseError("expected 2 columns, found " + std::to_string(fields.size()), number);
    double a = 0.0;
    double b = 0.0;
    const bool ok_a = parse_number(fields[0], a);
    const bool ok_b = parse_number(fields[1], b);
    if (!ok_a && !ok_b && data.x.empty() && number == 1) continue;  // header
    if (!ok_a || !ok_b) throw ParseError("non-numeric value", number);
    data.x.push_back(a);
    data.y.push_back(b);
  }
  if (data.x.empty()) throw ParseError("no data rows");
  return data;
}

XYData read_xy_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_xy_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

void write_xy_csv(std::ostream& out, const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("columns differ in length");
  out << "x,y\n";
  for (std::size_t i = 0; i < x.size(); ++i) out << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
}

void write_xy_csv(const std::filesystem::path& path, const std::vector<double>& x,
                  const std::vector<double>& y) {
  std::ostringstream s;
  write_xy_csv(s, x, y);
  write_text(path, s.str());
}

nlohmann::json pair_metadata(const LabeledPair& pair, const std::string& pair_id,
                             const std::string& dataset) {
  nlohmann::json mech = {{"sigma2", pair.mechanism.sigma2}, {"f", sigmoid_json(pair.mechanism.f)}};
  mech["g"] = pair.mechanism.g ? sigmoid_json(*pair.mechanism.g) : nlohmann::json(nullptr);
  mech["g_floor"] = pair.mechanism.g_floor;
  return {
      {"pair", pair_id},
      {"dataset", dataset},
      {"spec",
       {{"setting", to_string(pair.spec.setting)},
        {"noise", to_string(pair.spec.noise.kind)},
        {"shape", pair.spec.noise.shape},
        {"n", pair.spec.n}}},
      {"seed", pair.spec.seed},
      {"mechanism_params", mech},
      {"true_direction", to_string(pair.true_direction)},
  };
}

Direction truth_from_metadata(const nlohmann::json& meta) {
  if (!meta.is_object() || !meta.contains("true_direction") || !meta["true_direction"].is_string()) {
    throw ParseError("metadata has no true_direction");
  }
  const auto s = meta["true_direction"].get<std::string>();
  if (s == "x->y") return Direction::XtoY;
  if (s == "y->x") return Direction::YtoX;
  throw ParseError("unknown direction '" + s + "'");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

unsigned resolve_jobs(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("SKEWD_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace skewd
