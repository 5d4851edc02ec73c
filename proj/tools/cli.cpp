// Copyright 2026 The SPA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "spa/error.hpp"
#include "spa/io.hpp"
#include "spa/metrics.hpp"
#include "spa/report.hpp"
#include "spa/simulation.hpp"
#include "spa/weighting.hpp"

namespace spa::cli {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

Error usage(const std::string& message) {
  return Error(ErrorCode::kUsage, message);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, sep)) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SPA_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (*end != '\0') throw usage("SPA_SEED must be an unsigned integer");
    return value;
  }
  return 0;
}

std::vector<SchemeKind> parse_scheme_list(const std::string& text) {
  if (text == "all") {
    return {std::begin(kAllSchemeKinds), std::end(kAllSchemeKinds)};
  }
  std::vector<SchemeKind> kinds;
  for (const auto& name : split(text, ',')) {
    kinds.push_back(parse_scheme_kind(name));
  }
  if (kinds.empty()) throw usage("no weighting scheme given");
  return kinds;
}

bool contains(const std::vector<SchemeKind>& kinds, SchemeKind kind) {
  return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

std::vector<WeightScheme> make_schemes(
    const std::vector<SchemeKind>& kinds,
    const std::optional<ClassDistribution>& dist) {
  std::vector<WeightScheme> schemes;
  for (SchemeKind kind : kinds) {
    if (kind == SchemeKind::kInvVar) {
      schemes.push_back(WeightScheme::inv_var());
    } else if (kind == SchemeKind::kInvVarClass) {
      schemes.push_back(WeightScheme::inv_var_class(dist));
    } else {
      schemes.push_back(WeightScheme::simple(kind));
    }
  }
  return schemes;
}

struct InputOptions {
  std::string path;
  bool matrix = false;
  std::string duplicates = "error";
  std::string labels;
  std::int64_t min_annotations_warn = 2;
};

void add_input_options(CLI::App& cmd, InputOptions& opts, bool required) {
  auto* input = cmd.add_option("--input", opts.path,
                               "Annotation CSV (item_id,annotator_id,label)");
  if (required) input->required();
  cmd.add_flag("--matrix", opts.matrix,
               "Input is a matrix CSV: item_id then one column per annotator");
  cmd.add_option("--duplicates", opts.duplicates,
                 "Duplicate (item, annotator) handling: error|first|random")
      ->capture_default_str();
  cmd.add_option("--labels", opts.labels,
                 "Explicit ordered label universe, comma separated");
  cmd.add_option("--min-annotations-warn", opts.min_annotations_warn,
                 "Warn about items with fewer annotations than this")
      ->capture_default_str();
}

IngestPolicy make_policy(const InputOptions& opts, std::uint64_t seed) {
  IngestPolicy policy;
  policy.duplicate_resolution = parse_duplicate_resolution(opts.duplicates);
  policy.seed = seed;
  policy.min_annotations_warn = opts.min_annotations_warn;
  if (!opts.labels.empty()) policy.label_universe = split(opts.labels, ',');
  return policy;
}

void emit(const std::string& output, const std::string& contents,
          std::ostream& out) {
  if (output.empty() || output == "-") {
    out << contents;
  } else {
    write_file(output, contents);
  }
}

// ---------------------------------------------------------------- compute

struct ComputeOptions {
  InputOptions input;
  std::string scheme = "all";
  std::string class_dist;
  std::string format = "json";
  std::string output;
  std::optional<std::uint64_t> seed;
};

int run_compute(const ComputeOptions& opts, std::ostream& out) {
  const auto kinds = parse_scheme_list(opts.scheme);
  if (!opts.class_dist.empty() && !contains(kinds, SchemeKind::kInvVarClass)) {
    throw usage("--class-dist requires inv_var_class among the schemes");
  }
  if (opts.format != "json" && opts.format != "csv") {
    throw usage("--format must be json or csv");
  }
  const std::uint64_t seed = resolve_seed(opts.seed);
  const IngestPolicy policy = make_policy(opts.input, seed);
  IngestResult ingested = ingest_file(opts.input.path, policy, opts.input.matrix);

  std::optional<ClassDistribution> dist;
  if (!opts.class_dist.empty()) {
    dist = parse_class_distribution_json(read_file(opts.class_dist),
                                         ingested.table.label_universe());
  }
  const auto schemes = make_schemes(kinds, dist);

  ReportDocument doc;
  doc.report = build_report(ingested.table, schemes);
  doc.provenance.input_digest = ingested.digest;
  doc.provenance.policy = policy;
  doc.provenance.timestamp = timestamp_from_env();
  doc.warnings = std::move(ingested.warnings);

  const std::vector<std::string> labels(ingested.table.label_universe().begin(),
                                        ingested.table.label_universe().end());
  emit(opts.output,
       opts.format == "json" ? report_to_json(doc, labels) : report_to_csv(doc),
       out);
  return kExitOk;
}

// ----------------------------------------------------------- weight-curve

struct WeightCurveOptions {
  std::string scheme;
  std::int64_t n_min = 1;
  std::int64_t n_max = 0;
  std::optional<std::int64_t> classes;
  std::string class_dist;
  std::string output;
};

int run_weight_curve(const WeightCurveOptions& opts, std::ostream& out) {
  const SchemeKind kind = parse_scheme_kind(opts.scheme);
  if (!opts.class_dist.empty() && kind != SchemeKind::kInvVarClass) {
    throw usage("--class-dist only applies to --scheme inv_var_class");
  }
  WeightScheme scheme;
  if (kind == SchemeKind::kInvVar) {
    if (!opts.classes) throw usage("--scheme inv_var needs --classes");
    if (*opts.classes < 2) throw usage("--classes must be >= 2 for inv_var");
    scheme = WeightScheme::inv_var(*opts.classes);
  } else if (kind == SchemeKind::kInvVarClass) {
    if (opts.class_dist.empty()) {
      throw usage("--scheme inv_var_class needs --class-dist");
    }
    if (opts.classes) {
      throw usage("--classes conflicts with --class-dist for inv_var_class");
    }
    scheme = WeightScheme::inv_var_class(
        parse_class_distribution_json(read_file(opts.class_dist)));
  } else {
    scheme = WeightScheme::simple(kind);
  }
  if (opts.n_max < opts.n_min || opts.n_min < 1) {
    throw usage("--n-max must be >= --n-min >= 1");
  }
  emit(opts.output,
       weight_curve_csv(weight_curve(scheme, opts.n_min, opts.n_max)), out);
  return kExitOk;
}

// --------------------------------------------------------------- simulate

struct SimulateOptions {
  InputOptions input;
  std::string synthetic;
  std::string mode;
  std::int64_t trials = 3000;
  std::optional<std::uint64_t> seed;
  std::string schemes;
  std::string class_dist;
  std::string output_dir = ".";
  std::optional<std::int64_t> removals;
  double remove_fraction = 0.4;
  std::string removal = "uniform_random";
  double bias_strength = 20.0;
  std::string k_values = "2,4";
  std::int64_t gridpoints = 12;
  unsigned threads = 1;
};

// "items=200,annotators=6,classes=3,dist=0.5:0.3:0.2,skew=0.5,consensus=0.4,
// seed=1"
SynthSpec parse_synth_spec(const std::string& text, std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  std::optional<std::int64_t> classes;
  std::optional<std::vector<double>> dist;
  for (const auto& entry : split(text, ',')) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw usage("--synthetic entries must be key=value, got '" + entry + "'");
    }
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    try {
      if (key == "items") {
        spec.items = std::stoll(value);
      } else if (key == "annotators") {
        spec.annotators = std::stoll(value);
      } else if (key == "classes") {
        classes = std::stoll(value);
      } else if (key == "dist") {
        dist.emplace();
        for (const auto& p : split(value, ':')) dist->push_back(std::stod(p));
      } else if (key == "skew") {
        spec.per_annotator_skew = std::stod(value);
      } else if (key == "consensus") {
        spec.item_consensus = std::stod(value);
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else {
        throw usage("unknown --synthetic key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw usage("bad value for --synthetic key '" + key + "'");
    }
  }
  if (dist) {
    if (classes && *classes != static_cast<std::int64_t>(dist->size())) {
      throw usage("--synthetic classes does not match dist");
    }
    spec.dist = ClassDistribution(*dist, 1e-9);
  } else {
    if (classes && *classes < 1) throw usage("--synthetic classes must be >= 1");
    spec.dist = ClassDistribution::uniform(
        static_cast<std::size_t>(classes.value_or(2)));
  }
  return spec;
}

ordered_json scheme_json(const WeightScheme& s) {
  ordered_json j;
  j["kind"] = std::string(s.name());
  j["num_classes"] =
      s.num_classes ? ordered_json(*s.num_classes) : ordered_json(nullptr);
  if (s.class_dist) {
    ordered_json probs = ordered_json::array();
    for (double p : s.class_dist->probs()) probs.push_back(round_significant(p));
    j["class_dist"] = std::move(probs);
  } else {
    j["class_dist"] = nullptr;
  }
  return j;
}

std::string unbiasedness_csv(const std::vector<UnbiasednessResult>& results) {
  std::string csv =
      "scheme,mean,stderr,reference,trials_run,trials_skipped,within_3_sigma\n";
  for (const auto& r : results) {
    csv += r.scheme + "," + format_number(r.mean) + "," +
           format_number(r.std_error) + "," + format_number(r.reference) + "," +
           std::to_string(r.trials_run) + "," +
           std::to_string(r.trials_skipped) + "," +
           (r.within(3.0) ? "true" : "false") + "\n";
  }
  return csv;
}

int run_simulate(const SimulateOptions& opts, std::ostream& out,
                 std::ostream& err) {
  if (opts.input.path.empty() == opts.synthetic.empty()) {
    throw usage("simulate needs exactly one of --input or --synthetic");
  }
  if (opts.trials < 1) throw usage("--trials must be >= 1");
  if (opts.gridpoints < 1) throw usage("--gridpoints must be >= 1");
  if (opts.mode != "unbiasedness" && opts.mode != "variance-curves" &&
      opts.mode != "constant-k") {
    throw usage("--mode must be unbiasedness, variance-curves or constant-k");
  }
  if (opts.removal != "uniform_random" && opts.removal != "item_biased") {
    throw usage("--removal must be uniform_random or item_biased");
  }
  if (!(opts.remove_fraction >= 0.0 && opts.remove_fraction <= 1.0)) {
    throw usage("--remove-fraction must lie in [0, 1]");
  }
  const std::uint64_t seed = resolve_seed(opts.seed);

  ordered_json manifest;
  manifest["tool_version"] = std::string(kToolVersion);
  manifest["mode"] = opts.mode;

  AnnotationTable table;
  ordered_json input;
  if (!opts.synthetic.empty()) {
    const SynthSpec spec = parse_synth_spec(opts.synthetic, seed);
    table = synth_table(spec);
    input["source"] = "synthetic";
    input["spec"] = opts.synthetic;
    input["seed"] = spec.seed;
  } else {
    const IngestPolicy policy = make_policy(opts.input, seed);
    IngestResult ingested =
        ingest_file(opts.input.path, policy, opts.input.matrix);
    for (const auto& w : ingested.warnings) err << "warning: " << w << "\n";
    table = std::move(ingested.table);
    input["source"] = "file";
    input["path"] = opts.input.path;
    input["digest"] = "sha256:" + ingested.digest;
  }
  input["records"] = table.size();
  input["items"] = table.num_items();
  input["labels"] = table.num_classes();
  manifest["input"] = std::move(input);

  const std::string default_schemes =
      opts.mode == "unbiasedness" ? "flat,annotations,annotations_m1,edge,inv_var"
                                  : "all";
  const auto kinds =
      parse_scheme_list(opts.schemes.empty() ? default_schemes : opts.schemes);
  std::optional<ClassDistribution> dist;
  if (!opts.class_dist.empty()) {
    if (!contains(kinds, SchemeKind::kInvVarClass)) {
      throw usage("--class-dist requires inv_var_class among the schemes");
    }
    dist = parse_class_distribution_json(read_file(opts.class_dist),
                                         table.label_universe());
  }

  TrialConfig cfg;
  cfg.trials = opts.trials;
  cfg.seed = seed;
  cfg.schemes = make_schemes(kinds, dist);
  cfg.gridpoints = opts.gridpoints;
  cfg.threads = opts.threads;
  if (opts.removal == "item_biased") {
    cfg.removal = RemovalPolicy::item_biased(
        agreement_targeted_bias(table, opts.bias_strength));
  }
  const auto items = table.item_counts();
  std::vector<WeightScheme> resolved;
  for (const auto& s : cfg.schemes) resolved.push_back(resolve_scheme(s, items));

  ordered_json trial_config;
  trial_config["trials"] = cfg.trials;
  trial_config["seed"] = cfg.seed;
  ordered_json removal;
  removal["kind"] = std::string(cfg.removal.name());
  removal["bias_inducing"] = cfg.removal.bias_inducing();
  removal["bias_strength"] = cfg.removal.bias_inducing()
                                 ? ordered_json(opts.bias_strength)
                                 : ordered_json(nullptr);
  trial_config["removal"] = std::move(removal);
  ordered_json schemes = ordered_json::array();
  for (const auto& s : resolved) schemes.push_back(scheme_json(s));
  trial_config["scheme_set"] = std::move(schemes);
  trial_config["gridpoints"] = cfg.gridpoints;
  trial_config["threads"] = cfg.threads;

  const fs::path dir(opts.output_dir);
  std::map<std::string, std::string> files;
  ordered_json results;

  if (opts.mode == "unbiasedness") {
    const std::int64_t removals =
        opts.removals.value_or(std::llround(opts.remove_fraction *
                                            static_cast<double>(table.size())));
    cfg.target = SubsampleTarget::total(static_cast<std::int64_t>(table.size()) -
                                        removals);
    ordered_json target;
    target["kind"] = "total";
    target["value"] = cfg.target.value;
    target["removals"] = removals;
    trial_config["target"] = std::move(target);

    const auto outcome = unbiasedness_experiments(table, removals, cfg);
    files["unbiasedness.csv"] = unbiasedness_csv(outcome);
    if (cfg.removal.bias_inducing()) {
      out << "note: item_biased removal violates the missingness "
             "independence assumption; bias is expected\n";
    }
    for (const auto& r : outcome) {
      const bool pass = r.within(3.0);
      out << r.scheme << ": mean=" << format_number(r.mean)
          << " stderr=" << format_number(r.std_error)
          << " reference=" << format_number(r.reference)
          << " skipped=" << r.trials_skipped << " "
          << (pass ? "PASS" : "FAIL") << " (|mean - reference| <= 3 stderr)\n";
      ordered_json entry;
      entry["scheme"] = r.scheme;
      entry["mean"] = round_significant(r.mean);
      entry["stderr"] = round_significant(r.std_error);
      entry["reference"] = round_significant(r.reference);
      entry["trials_run"] = r.trials_run;
      entry["trials_skipped"] = r.trials_skipped;
      entry["within_3_sigma"] = pass;
      results.push_back(std::move(entry));
    }
  } else if (opts.mode == "variance-curves") {
    ordered_json target;
    target["kind"] = "total";
    target["grid"] = "log-spaced from 2*items to all records";
    trial_config["target"] = std::move(target);

    const auto curves = variance_curves(table, cfg);
    files["curves.csv"] = variance_curves_csv(curves);
    std::string sums = "scheme,sum_under_curve\n";
    for (const auto& c : curves) {
      sums += c.scheme + "," + format_number(c.sum_under_curve.value_or(0.0)) +
              "\n";
      out << c.scheme << ": sum_under_curve="
          << format_number(c.sum_under_curve.value_or(0.0)) << "\n";
      results[c.scheme] = round_significant(c.sum_under_curve.value_or(0.0));
    }
    files["sum_under_curve.csv"] = std::move(sums);
  } else {
    std::vector<std::int64_t> ks;
    try {
      for (const auto& k : split(opts.k_values, ',')) ks.push_back(std::stoll(k));
    } catch (const std::logic_error&) {
      throw usage("--k-values must be a comma separated list of integers");
    }
    if (ks.empty()) throw usage("--k-values is empty");
    ordered_json target;
    target["kind"] = "per_item";
    target["k_values"] = ks;
    trial_config["target"] = std::move(target);

    ConstantKResult outcome;
    try {
      outcome = constant_k_comparison(table, ks, cfg);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kEmptyResult) {
        throw Error(ErrorCode::kDegenerateExperiment, e.what());
      }
      throw;
    }
    for (const auto& w : outcome.warnings) err << "warning: " << w << "\n";
    files["curves.csv"] = variance_curves_csv(outcome.curves);
    for (const auto& c : outcome.curves) {
      out << c.scheme << ": " << c.points.size() << " gridpoints\n";
      results[c.scheme] = c.points.size();
    }
    manifest["warnings"] = outcome.warnings;
  }
  manifest["trial_config"] = std::move(trial_config);
  manifest["results"] = std::move(results);
  files["manifest.json"] = manifest.dump(2) + "\n";

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir.string() + "'");
  for (const auto& [name, contents] : files) write_file(dir / name, contents);
  return kExitOk;
}

// --------------------------------------------------------------- validate

int run_validate(const InputOptions& opts,
                 const std::optional<std::uint64_t>& seed_flag,
                 std::ostream& out) {
  const IngestPolicy policy = make_policy(opts, resolve_seed(seed_flag));
  const IngestResult ingested = ingest_file(opts.path, policy, opts.matrix);
  const AnnotationTable& table = ingested.table;
  const auto counts = table.item_counts();

  std::map<std::int64_t, std::int64_t> histogram;
  std::int64_t below = 0;
  for (const auto& c : counts) {
    ++histogram[c.n()];
    if (!c.pairable()) ++below;
  }
  out << "items        " << table.num_items() << "\n"
      << "annotators   " << table.num_annotators() << "\n"
      << "labels       " << table.num_classes() << "\n"
      << "annotations  " << table.size() << "\n"
      << "equal depth  " << (equal_depth(counts) ? "yes" : "no") << "\n"
      << "n_i histogram\n"
      << "  n_i  items\n";
  for (const auto& [n, items] : histogram) {
    out << "  " << std::setw(3) << n << "  " << items << "\n";
  }
  out << below << " items below pairable threshold (n_i < 2)\n";
  for (const auto& w : ingested.warnings) out << "warning: " << w << "\n";
  out << "digest sha256:" << ingested.digest << "\n";
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return kExitUsage;
    case ErrorCode::kDegenerateExperiment:
    case ErrorCode::kEmptyResult:
      return kExitInfeasible;
    default:
      return kExitDataError;
  }
}

void print_error(std::ostream& err, std::string_view code,
                 const std::string& message, int exit_code) {
  ordered_json j;
  j["error"]["code"] = std::string(code);
  j["error"]["message"] = message;
  j["error"]["exit_code"] = exit_code;
  err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Sparse probability of agreement (SPA) for sparsely annotated "
               "datasets",
               "spa"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  ComputeOptions compute;
  auto* compute_cmd =
      app.add_subcommand("compute", "Compute PA, SPA and Fleiss' kappa");
  add_input_options(*compute_cmd, compute.input, true);
  compute_cmd
      ->add_option("--scheme", compute.scheme,
                   "flat|annotations|annotations_m1|edge|inv_var|"
                   "inv_var_class|all, or a comma separated list")
      ->capture_default_str();
  compute_cmd->add_option("--class-dist", compute.class_dist,
                          "JSON object label -> probability for inv_var_class");
  compute_cmd->add_option("--format", compute.format, "json|csv")
      ->capture_default_str();
  compute_cmd->add_option("--output", compute.output, "Output file (stdout)");
  compute_cmd->add_option("--seed", compute.seed,
                          "Seed for random duplicate resolution (SPA_SEED)");

  WeightCurveOptions curve;
  auto* curve_cmd = app.add_subcommand(
      "weight-curve", "Normalized weight per annotation count as CSV");
  curve_cmd->add_option("--scheme", curve.scheme, "Weighting scheme")
      ->required();
  curve_cmd->add_option("--n-max", curve.n_max, "Largest annotation count")
      ->required();
  curve_cmd->add_option("--n-min", curve.n_min, "Smallest annotation count")
      ->capture_default_str();
  curve_cmd->add_option("--classes", curve.classes, "Number of classes C");
  curve_cmd->add_option("--class-dist", curve.class_dist,
                        "JSON class distribution for inv_var_class");
  curve_cmd->add_option("--output", curve.output, "Output file (stdout)");

  SimulateOptions sim;
  auto* sim_cmd =
      app.add_subcommand("simulate", "Monte Carlo experiments on SPA");
  add_input_options(*sim_cmd, sim.input, false);
  sim_cmd->add_option("--synthetic", sim.synthetic,
                      "Synthetic table, e.g. items=200,annotators=6,classes=3");
  sim_cmd->add_option("--mode", sim.mode,
                      "unbiasedness|variance-curves|constant-k")
      ->required();
  sim_cmd->add_option("--trials", sim.trials, "Monte Carlo trials")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Master seed (SPA_SEED)");
  sim_cmd->add_option("--schemes", sim.schemes,
                      "Comma separated schemes or all");
  sim_cmd->add_option("--class-dist", sim.class_dist,
                      "JSON class distribution for inv_var_class");
  sim_cmd->add_option("--output-dir", sim.output_dir, "Output directory")
      ->capture_default_str();
  sim_cmd->add_option("--removals", sim.removals,
                      "Annotations removed per trial (unbiasedness)");
  sim_cmd->add_option("--remove-fraction", sim.remove_fraction,
                      "Fraction removed when --removals is not given")
      ->capture_default_str();
  sim_cmd->add_option("--removal", sim.removal, "uniform_random|item_biased")
      ->capture_default_str();
  sim_cmd->add_option("--bias-strength", sim.bias_strength,
                      "item_biased multiplier 1 + strength * P_i")
      ->capture_default_str();
  sim_cmd->add_option("--k-values", sim.k_values,
                      "Annotations per item for constant-k")
      ->capture_default_str();
  sim_cmd->add_option("--gridpoints", sim.gridpoints, "Budget gridpoints")
      ->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads, "Worker threads")
      ->capture_default_str();

  InputOptions validate;
  std::optional<std::uint64_t> validate_seed;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check an annotation file and summarize it");
  add_input_options(*validate_cmd, validate, true);
  validate_cmd->add_option("--seed", validate_seed,
                           "Seed for random duplicate resolution (SPA_SEED)");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("spa");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, error_code_name(ErrorCode::kUsage), e.what(), kExitUsage);
    return kExitUsage;
  }

  try {
    if (*compute_cmd) return run_compute(compute, out);
    if (*curve_cmd) return run_weight_curve(curve, out);
    if (*sim_cmd) return run_simulate(sim, out, err);
    if (*validate_cmd) return run_validate(validate, validate_seed, out);
    throw usage("unknown subcommand");
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    print_error(err, error_code_name(e.code()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what(), kExitDataError);
    return kExitDataError;
  }
}

}  // namespace spa::cli
