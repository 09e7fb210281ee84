// Command-line front end for the sidewalk width pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sidewalk/pipeline.hpp"

namespace {

using namespace sidewalk;

struct Options {
  std::string config;
  std::optional<unsigned> workers;
  std::string output;
  bool verbose = false;
  std::string records;
};

Logger make_logger(bool verbose) {
  return [verbose](LogLevel level, const std::string& msg) {
    if (level == LogLevel::kDebug && !verbose) return;
    if (level == LogLevel::kInfo && !verbose) return;
    const char* tag = level == LogLevel::kWarning ? "warning" : level == LogLevel::kInfo ? "info" : "debug";
    std::cerr << "[" << tag << "] " << msg << "\n";
  };
}

PipelineConfig load(const Options& o) {
  if (o.config.empty()) throw ValidationError("--config is required");
  PipelineConfig cfg = read_config(o.config);
  if (o.workers) cfg.workers = *o.workers;
  if (!o.output.empty()) cfg.paths.output_dir = o.output;
  cfg.validate();
  return cfg;
}

int run_stats(const Options& o, const Logger& log) {
  fs::path out = o.output;
  fs::path records = o.records;
  if (!o.config.empty()) {
    const PipelineConfig cfg = load(o);
    if (out.empty()) out = cfg.paths.output_dir;
    if (records.empty()) records = cfg.paths.output_dir / "major_records.geojson";
  }
  if (records.empty()) throw ValidationError("stats needs a records file or --config");
  if (out.empty()) out = records.parent_path();
  cmd_stats(records, out, log);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimate full and obstacle-free sidewalk widths from two point cloud epochs."};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Options o;
  app.add_option("--config", o.config, "pipeline configuration (JSON)");
  app.add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output", o.output, "output directory");
  app.add_flag("-v,--verbose", o.verbose, "log per-sidewalk progress");

  auto* extract = app.add_subcommand("extract-obstacles", "detect static obstacles and merge registry footprints");
  auto* compute = app.add_subcommand("compute-widths", "centerlines, widths and major path records");
  auto* stats = app.add_subcommand("stats", "width category statistics from major path records");
  stats->add_option("records", o.records, "major_records.geojson (default: <output>/major_records.geojson)");
  auto* run = app.add_subcommand("run", "all stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const Logger log = make_logger(o.verbose);
  try {
    if (*stats) return run_stats(o, log);
    const PipelineConfig cfg = load(o);
    if (*extract) cmd_extract_obstacles(cfg, log);
    if (*compute) cmd_compute_widths(cfg, log);
    if (*run) cmd_run(cfg, log);
    return 0;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
