// skewd: generate benchmark pairs, infer causal directions, run benchmarks
// and emit decision-rate curves.
#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "skewd/datagen.hpp"
#include "skewd/error.hpp"
#include "skewd/evaluation.hpp"
#include "skewd/inference.hpp"
#include "skewd/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string profile = "fast";
  std::uint64_t seed = 0;
  std::string rule = "likelihood";
  int jobs = 0;
  // optional overrides of the profile
  std::optional<int> q, p, population, max_iters, folds, lhs, ei;
  std::string hsic = "gamma";
  int permutations = 500;
};

void add_fit_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--profile", o.profile, "Budget profile")->check(CLI::IsMember({"paper", "fast"}));
  cmd.add_option("--seed", o.seed, "Master seed");
  cmd.add_option("--rule", o.rule, "Decision rule")->check(CLI::IsMember({"likelihood", "independence", "both"}));
  cmd.add_option("--q", o.q, "Location basis size");
  cmd.add_option("--p", o.p, "Scale basis size");
  cmd.add_option("--population", o.population, "CMA-ES population");
  cmd.add_option("--max-iters", o.max_iters, "CMA-ES and ECM iteration cap");
  cmd.add_option("--folds", o.folds, "Cross-validation folds");
  cmd.add_option("--lhs", o.lhs, "Initial Bayesian-optimization candidates");
  cmd.add_option("--ei", o.ei, "Expected-improvement candidates");
  cmd.add_option("--hsic", o.hsic, "HSIC null approximation")->check(CLI::IsMember({"gamma", "permutation"}));
  cmd.add_option("--permutations", o.permutations, "HSIC permutations")->check(CLI::PositiveNumber);
}

skewd::InferenceConfig make_config(const Options& o) {
  auto c = skewd::InferenceConfig::for_profile(skewd::parse_profile(o.profile));
  if (o.q) c.fit.q = *o.q;
  if (o.p) c.fit.p = *o.p;
  if (o.population) c.fit.heuristic.population = c.fit.cv_heuristic.population = *o.population;
  if (o.max_iters) c.fit.heuristic.max_iters = c.fit.ecm.max_iters = *o.max_iters;
  if (o.folds) c.fit.bayes_opt.folds = *o.folds;
  if (o.lhs) c.fit.bayes_opt.lhs_candidates = *o.lhs;
  if (o.ei) c.fit.bayes_opt.ei_candidates = *o.ei;
  c.hsic.method = o.hsic == "gamma" ? skewd::HsicMethod::gamma : skewd::HsicMethod::permutation;
  c.hsic.num_permutations = o.permutations;
  return c;
}

skewd::RuleSelection make_rules(const std::string& rule) {
  return {rule != "independence", rule != "likelihood"};
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json decision_json(const skewd::Decision& d) {
  return {{"inferred", skewd::to_string(d.inferred)}, {"confidence", d.confidence}, {"tie", d.tie}};
}

// The primary decision is the likelihood rule unless only the independence
// rule was requested.
const skewd::Decision& primary(const skewd::PairInference& r) {
  return r.likelihood ? *r.likelihood : *r.independence;
}

json decision_record(const std::string& pair, const std::string& rule, const skewd::PairInference& r,
                     std::uint64_t seed, const std::string& profile) {
  const auto& d = primary(r);
  json decisions = json::object();
  if (r.likelihood) decisions["likelihood"] = decision_json(*r.likelihood);
  if (r.independence) decisions["independence"] = decision_json(*r.independence);
  const bool ll = r.likelihood.has_value();
  return {
      {"pair", pair},
      {"rule", rule},
      {"inferred", skewd::to_string(d.inferred)},
      {"confidence", d.confidence},
      {"ll_xy", ll ? json(r.xy.conditional_loglik) : json(nullptr)},
      {"ll_yx", ll ? json(r.yx.conditional_loglik) : json(nullptr)},
      {"p_xy", nullable(r.xy.residual_pvalue)},
      {"p_yx", nullable(r.yx.residual_pvalue)},
      {"lambda_xy", r.xy.fit.theta.lambda},
      {"lambda_yx", r.yx.fit.theta.lambda},
      {"decisions", decisions},
      {"seed", seed},
      {"profile", profile},
  };
}

std::string pair_id(std::size_t index) {
  std::ostringstream s;
  s << std::setw(4) << std::setfill('0') << index;
  return s.str();
}

int cmd_generate(const std::string& dataset, std::size_t pairs, std::size_t n, std::uint64_t seed,
                 const fs::path& out_dir) {
  const auto name = skewd::parse_dataset_name(dataset);
  fs::create_directories(out_dir);
  const auto data = skewd::generate_dataset(name, pairs, n, seed);
  json manifest = {{"dataset", dataset}, {"pairs", pairs}, {"n", n}, {"seed", seed}, {"files", json::array()}};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::string id = pair_id(i);
    skewd::write_xy_csv(out_dir / ("pair_" + id + ".csv"), data[i].x, data[i].y);
    skewd::write_text(out_dir / ("pair_" + id + ".meta.json"),
                      skewd::pair_metadata(data[i], id, dataset).dump(2) + "\n");
    manifest["files"].push_back({{"pair", id}, {"seed", data[i].spec.seed}});
  }
  skewd::write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

int cmd_infer(const fs::path& csv, const Options& o) {
  const auto data = skewd::read_xy_csv(csv);
  const auto config = make_config(o);
  const auto start = std::chrono::steady_clock::now();
  const auto r = skewd::infer_pair(data.x, data.y, config, o.seed, make_rules(o.rule));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json rec = decision_record(csv.stem().string(), o.rule, r, o.seed, o.profile);
  rec["runtime_seconds"] = seconds;
  std::cout << rec.dump() << "\n";
  return 0;
}

struct BenchItem {
  std::string id;
  fs::path csv;
  skewd::Direction truth;
};

int cmd_benchmark(const fs::path& dir, const fs::path& out, const Options& o) {
  if (!fs::is_directory(dir)) throw skewd::ConfigurationError("not a directory: " + dir.string());
  std::vector<fs::path> csvs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") csvs.push_back(entry.path());
  }
  std::sort(csvs.begin(), csvs.end());

  std::vector<BenchItem> items;
  std::size_t skipped = 0;
  for (const auto& csv : csvs) {
    fs::path meta = csv;
    meta.replace_extension(".meta.json");
    try {
      const auto truth = skewd::truth_from_metadata(json::parse(skewd::read_text(meta)));
      items.push_back({csv.stem().string(), csv, truth});
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << csv.filename().string() << ": " << e.what() << "\n";
      ++skipped;
    }
  }

  const auto config = make_config(o);
  const auto rules = make_rules(o.rule);
  std::vector<json> records(items.size());
  std::vector<std::optional<skewd::PairInference>> results(items.size());
  const unsigned jobs = skewd::resolve_jobs(o.jobs);
  skewd::parallel_for(items.size(), jobs, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = skewd::read_xy_csv(items[i].csv);
    const std::uint64_t seed = skewd::derive_seed(o.seed, i);
    auto r = skewd::infer_pair(data.x, data.y, config, seed, rules);
    json rec = decision_record(items[i].id, o.rule, r, seed, o.profile);
    rec["truth"] = skewd::to_string(items[i].truth);
    records[i] = std::move(rec);
    results[i] = std::move(r);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "done " << items[i].id << " in " << secs << " s\n";
  });

  std::ostringstream jsonl;
  for (const auto& rec : records) jsonl << rec.dump() << "\n";
  skewd::write_text(out, jsonl.str());

  json summary = {{"pairs", items.size()}, {"skipped", skipped}, {"per_rule", json::object()}};
  for (const skewd::Rule rule : {skewd::Rule::likelihood, skewd::Rule::independence}) {
    std::vector<skewd::ScoredPrediction> preds;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& d = rule == skewd::Rule::likelihood ? results[i]->likelihood : results[i]->independence;
      if (d) preds.push_back({items[i].id, d->inferred, items[i].truth, d->confidence});
    }
    if (preds.empty()) continue;
    summary["per_rule"][skewd::to_string(rule)] = {{"accuracy", skewd::accuracy(preds)},
                                                   {"audrc", skewd::audrc(preds)}};
  }
  if (!items.empty()) {
    const std::string main_rule = o.rule == "independence" ? "independence" : "likelihood";
    summary["accuracy"] = summary["per_rule"][main_rule]["accuracy"];
    summary["audrc"] = summary["per_rule"][main_rule]["audrc"];
  }
  fs::path summary_path = out;
  summary_path.replace_extension(".summary.json");
  skewd::write_text(summary_path, summary.dump(2) + "\n");
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_curve(const fs::path& results, const fs::path& out, const std::string& rule) {
  std::ifstream in(results);
  if (!in) throw skewd::Error("cannot open " + results.string());
  std::vector<skewd::ScoredPrediction> preds;
  std::string line;
  long number = 0;
  auto direction = [&](const json& v) {
    const auto s = v.get<std::string>();
    if (s == "x->y") return skewd::Direction::XtoY;
    if (s == "y->x") return skewd::Direction::YtoX;
    throw skewd::ParseError("unknown direction '" + s + "'", number);
  };
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      const json& d = rule.empty() ? rec : rec.at("decisions").at(rule);
      preds.push_back({rec.at("pair").get<std::string>(), direction(d.at("inferred")),
                       direction(rec.at("truth")), d.at("confidence").get<double>()});
    } catch (const json::exception& e) {
      throw skewd::ParseError(std::string("malformed result record: ") + e.what(), number);
    }
  }
  if (preds.empty()) throw skewd::ParseError("results file has no records");
  std::ostringstream csv;
  csv << "rate,accuracy\n";
  for (const auto& pt : skewd::decision_rate_curve(preds)) {
    csv << skewd::format_double(pt.rate) << ',' << skewd::format_double(pt.accuracy) << '\n';
  }
  skewd::write_text(out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal direction inference under skew-normal location-scale noise"};
  app.require_subcommand(1);
  Options opt;

  std::string dataset;
  std::size_t pairs = 100;
  std::size_t n = 1000;
  std::string out;
  auto* gen = app.add_subcommand("generate", "Write a synthetic benchmark dataset");
  gen->add_option("dataset", dataset, "ANs_m455|ANs_985|ANs_1750|LSs_m455|LSs_985|LSs_1750|AN|ANs|LS|LSs")->required();
  gen->add_option("--pairs", pairs, "Number of pairs")->check(CLI::PositiveNumber);
  gen->add_option("--n", n, "Observations per pair")->check(CLI::PositiveNumber);
  gen->add_option("--seed", opt.seed, "Master seed");
  gen->add_option("--out", out, "Output directory")->required();

  std::string csv;
  auto* infer = app.add_subcommand("infer", "Infer the causal direction of one pair");
  infer->add_option("csv", csv, "Two-column CSV")->required();
  add_fit_options(*infer, opt);

  std::string data_dir;
  auto* bench = app.add_subcommand("benchmark", "Run inference over a generated dataset");
  bench->add_option("data_dir", data_dir, "Directory with pair CSVs and metadata")->required();
  bench->add_option("--out", out, "Per-pair JSONL output")->required();
  bench->add_option("--jobs", opt.jobs, "Worker threads (default: SKEWD_THREADS or all cores)");
  add_fit_options(*bench, opt);

  std::string results;
  std::string curve_rule;
  auto* curve = app.add_subcommand("curve", "Decision-rate curve from benchmark results");
  curve->add_option("results", results, "Benchmark JSONL")->required();
  curve->add_option("--out", out, "Curve CSV")->required();
  curve->add_option("--rule", curve_rule, "Rule to plot (default: the record's primary rule)")
      ->check(CLI::IsMember({"likelihood", "independence"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(dataset, pairs, n, opt.seed, out);
    if (*infer) return cmd_infer(csv, opt);
    if (*bench) return cmd_benchmark(data_dir, out, opt);
    if (*curve) return cmd_curve(results, out, curve_rule);
  } catch (const skewd::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const skewd::ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
