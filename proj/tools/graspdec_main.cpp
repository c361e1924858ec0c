#include "graspdec/actuation.hpp"
#include "graspdec/epoch_io.hpp"
#include "graspdec/eval.hpp"
#include "graspdec/layout.hpp"
#include "graspdec/model_io.hpp"
#include "graspdec/parallel.hpp"
#include "graspdec/preprocess.hpp"
#include "graspdec/report.hpp"
#include "graspdec/rng.hpp"
#include "graspdec/stats.hpp"
#include "graspdec/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace graspdec;

int map_exit_code(const Error& e) {
  switch (e.code()) {
    case Error::Code::bad_config:
    case Error::Code::bad_argument:
    case Error::Code::io_failure:
      return 2;  // usage / config error
    default:
      return 1;  // runtime failure
  }
}

std::vector<ModelKind> parse_models(const std::string& csv) {
  std::vector<ModelKind> kinds;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) kinds.push_back(model_kind_from_name(token));
  }
  if (kinds.empty()) throw Error(Error::Code::bad_config, "no models selected");
  return kinds;
}

std::vector<PairId> parse_pairs(const std::string& csv) {
  std::vector<PairId> pairs;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) pairs.push_back(pair_from_name(token));
  }
  if (pairs.empty()) throw Error(Error::Code::bad_config, "no pairs selected");
  return pairs;
}

int default_wavelet_level(double rate) { return rate <= 125.0 ? 2 : 3; }

// Flags shared by evaluate and ablate.
struct EvalFlags {
  std::string input;
  std::string out_dir;
  std::string models = "lda,svm-linear,svm-rbf,mlp,mdm,ts-svm";
  std::string pairs = "TG/PG,TG/Open,TG/Rest,PG/Open,PG/Rest,Open/Rest";
  int folds = 5;
  std::uint64_t fold_seed = 1;
  bool no_augment = false;
  bool paper_order = false;
  int target_per_class = 90;
  int wavelet_level = 0;  // 0 = from sample rate
  std::string band = "approx";
  int n_filters = 0;
  std::uint64_t model_seed = 1;
  int jobs = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--in", input, "input epoch file")->required();
    cmd->add_option("--out-dir", out_dir, "report directory")
        ->envname("GRASPDEC_OUT")
        ->required();
    cmd->add_option("--models", models, "comma list of classifiers");
    cmd->add_option("--pairs", pairs, "comma list of class pairs, e.g. TG/PG");
    cmd->add_option("--folds", folds, "cross-validation folds");
    cmd->add_option("--fold-seed", fold_seed, "seed for the fold plans");
    cmd->add_flag("--no-augment", no_augment, "skip in-fold augmentation");
    cmd->add_flag("--paper-order", paper_order,
                  "input was augmented before the split; skip in-fold augmentation");
    cmd->add_option("--target-per-class", target_per_class, "augmentation target per class");
    cmd->add_option("--wavelet-level", wavelet_level,
                    "decomposition depth (0 = 2 for 125 Hz, 3 otherwise)");
    cmd->add_option("--band", band, "wavelet band for features: approx | approx+detail");
    cmd->add_option("--n-filters", n_filters, "CSP filters to keep (0 = montage default)");
    cmd->add_option("--model-seed", model_seed, "seed for classifier initialization");
    cmd->add_option("--jobs", jobs, "parallel workers over the evaluation grid");
  }

  EvalOptions options(double sample_rate) const {
    EvalOptions opts;
    opts.augment = !no_augment && !paper_order;
    opts.paper_order = paper_order;
    opts.target_per_class = target_per_class;
    opts.wavelet.level = wavelet_level > 0 ? wavelet_level : default_wavelet_level(sample_rate);
    if (band == "approx") {
      opts.band = WaveletBand::approx_only;
    } else if (band == "approx+detail") {
      opts.band = WaveletBand::approx_plus_detail;
    } else {
      throw Error(Error::Code::bad_config, "unknown band: " + band);
    }
    opts.n_filters = n_filters;
    opts.seed = fold_seed;
    return opts;
  }

  ModelSpec model_spec(ModelKind kind) const {
    ModelSpec spec;
    spec.kind = kind;
    spec.seed = model_seed;
    return spec;
  }
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Error::Code::unwritable_path, "cannot create directory " + dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// ---------------------------------------------------------------------------

int cmd_synth(const std::string& out, const std::string& layout_name, int trials, double rate,
              double movement_gain, double rest_gain, double noise_sigma, double separation,
              std::uint64_t seed) {
  const ElectrodeLayout layout = builtin_layout(layout_name);
  SynthSpec spec = default_synth_spec(layout.names, rate, trials, seed, separation);
  spec.noise_sigma = noise_sigma;
  for (Label l : {Label::TG, Label::PG, Label::Open}) spec.gains[l] = movement_gain;
  spec.gains[Label::Rest] = rest_gain;
  const EpochSet set = generate(spec);
  save_epochs(set, out);
  std::printf("wrote %d trials x %d channels x %d samples to %s\n", set.n_trials(),
              set.n_channels(), set.n_samples(), out.c_str());
  return 0;
}

int cmd_preprocess(const std::string& in, const std::string& out, double target_rate,
                   bool no_notch, double notch_hz, double notch_q, bool no_bandpass,
                   double band_lo, double band_hi, int augment_to, std::uint64_t augment_seed,
                   bool no_normalize, const std::string& audit_dir) {
  EpochSet set = load_epochs(in);
  if (target_rate > 0.0) set = resample(set, target_rate);
  if (!no_notch) set = apply_filter(set, notch_spec(notch_hz, notch_q));
  if (!no_bandpass) set = apply_filter(set, bandpass_spec(band_lo, band_hi));
  if (augment_to > 0) set = augment_analogy(set, augment_to, augment_seed);
  if (!no_normalize) {
    const NormalizationParams params = fit_normalization(set);
    set = normalize_robust(set, params);
    if (!audit_dir.empty()) {
      ensure_dir(audit_dir);
      save_normalization(params, join_path(audit_dir, "normalization.json"));
    }
  }
  if (!audit_dir.empty()) {
    ensure_dir(audit_dir);
    std::ofstream audit(join_path(audit_dir, "preprocess.json"));
    audit << "{\n  \"target_rate\": " << format_number(target_rate)
          << ",\n  \"notch\": " << (no_notch ? "null" : format_number(notch_hz))
          << ",\n  \"bandpass\": "
          << (no_bandpass ? "null"
                          : "[" + format_number(band_lo) + ", " + format_number(band_hi) + "]")
          << ",\n  \"augment_to\": " << augment_to << ",\n  \"augment_seed\": " << augment_seed
          << ",\n  \"normalized\": " << (no_normalize ? "false" : "true") << "\n}\n";
  }
  save_epochs(set, out);
  std::printf("wrote %d trials to %s\n", set.n_trials(), out.c_str());
  return 0;
}

std::vector<EvalResult> evaluate_grid(const EpochSet& set, const EvalFlags& flags,
                                      int combo_id = 0) {
  const std::vector<ModelKind> kinds = parse_models(flags.models);
  const std::vector<PairId> pairs = parse_pairs(flags.pairs);
  const EvalOptions opts = flags.options(set.sample_rate);

  std::vector<FoldPlan> plans(pairs.size());
  std::vector<double> class_dis(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), flags.jobs, [&](int pi) {
    std::vector<Label> pair_labels;
    for (Label l : set.labels) {
      if (l == pairs[pi].first || l == pairs[pi].second) pair_labels.push_back(l);
    }
    const std::uint64_t tag = (static_cast<std::uint64_t>(pairs[pi].first) << 8) |
                              static_cast<std::uint64_t>(pairs[pi].second);
    plans[pi] = stratified_folds(pair_labels, flags.folds, derive_seed(flags.fold_seed, tag));
    class_dis[pi] = pair_class_distinctiveness(set, pairs[pi]);
  });

  const int n_tasks = static_cast<int>(pairs.size() * kinds.size());
  std::vector<EvalResult> results(n_tasks);
  parallel_for(n_tasks, flags.jobs, [&](int task) {
    const std::size_t pi = task / kinds.size();
    const std::size_t mi = task % kinds.size();
    EvalOptions task_opts = opts;
    const std::uint64_t tag = (static_cast<std::uint64_t>(pairs[pi].first) << 8) |
                              static_cast<std::uint64_t>(pairs[pi].second);
    task_opts.seed = derive_seed(opts.seed, tag);
    EvalResult r;
    r.combo_id = combo_id;
    r.report = evaluate_pair(set, pairs[pi], pipeline_for(kinds[mi]),
                             flags.model_spec(kinds[mi]), plans[pi], task_opts);
    int n_test = 0;
    for (const FoldMetrics& f : r.report.folds) n_test += f.n_test;
    r.chance = chance_level(n_test, 0.05);
    r.class_dis = class_dis[pi];
    results[task] = r;
  });
  return results;
}

int cmd_evaluate(const EvalFlags& flags) {
  const EpochSet set = load_epochs(flags.input);
  const std::vector<EvalResult> results = evaluate_grid(set, flags);
  ensure_dir(flags.out_dir);
  write_results_csv(results, join_path(flags.out_dir, "results.csv"));
  write_folds_csv(results, join_path(flags.out_dir, "folds.csv"));
  write_summary_json(results, join_path(flags.out_dir, "summary.json"));
  std::printf("wrote %zu result rows to %s\n", results.size(), flags.out_dir.c_str());
  return 0;
}

int cmd_ablate(const EvalFlags& flags, const std::string& combos_csv,
               const std::string& layout_file, const std::string& handedness) {
  EpochSet set = load_epochs(flags.input);
  set.meta.handedness = handedness == "left" ? Handedness::left : Handedness::right;

  std::vector<CombinationSpec> available =
      layout_file.empty() ? builtin_combinations() : load_layout_file(layout_file).combinations;
  std::vector<CombinationSpec> combos;
  {
    std::stringstream ss(combos_csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (token.empty()) continue;
      const int id = std::stoi(token);
      if (id == 0) {
        // combination 0 is always the montage the input was recorded with
        CombinationSpec full;
        full.id = 0;
        full.members_right = set.channels;
        full.members_left = set.channels;
        combos.push_back(full);
        continue;
      }
      const auto it = std::find_if(available.begin(), available.end(),
                                   [&](const CombinationSpec& c) { return c.id == id; });
      if (it == available.end()) {
        throw Error(Error::Code::bad_config, "unknown combination id " + token);
      }
      combos.push_back(*it);
    }
  }
  if (combos.empty()) throw Error(Error::Code::bad_config, "no combinations selected");

  std::vector<ModelSpec> model_specs;
  for (ModelKind kind : parse_models(flags.models)) model_specs.push_back(flags.model_spec(kind));
  const std::vector<PairId> pairs = parse_pairs(flags.pairs);
  const EvalOptions opts = flags.options(set.sample_rate);

  const AblationTable table = run_ablation(set, combos, model_specs, pairs, flags.folds,
                                           flags.fold_seed, opts, flags.jobs);
  ensure_dir(flags.out_dir);
  write_ablation_csv(table, join_path(flags.out_dir, "ablation.csv"));
  write_ablation_svg(table, join_path(flags.out_dir, "ablation.svg"));
  std::printf("wrote %zu ablation rows to %s\n", table.rows.size(), flags.out_dir.c_str());
  return 0;
}

// One value set per input file: rows keyed by the leading identity columns of
// either results.csv (mean_accuracy) or folds.csv (accuracy).
struct ResultSet {
  std::string path;
  std::map<std::string, double> values;
};

ResultSet load_result_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Code::io_failure, "cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) {
    throw Error(Error::Code::bad_config, path + " is empty");
  }
  std::vector<std::string> columns;
  {
    std::stringstream ss(header);
    std::string token;
    while (std::getline(ss, token, ',')) columns.push_back(token);
  }
  int value_col = -1;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == "mean_accuracy" || columns[i] == "accuracy") {
      value_col = static_cast<int>(i);
      break;
    }
  }
  if (value_col < 0) {
    throw Error(Error::Code::bad_config, path + " has no accuracy column");
  }
  ResultSet set;
  set.path = path;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string token, key;
    int col = 0;
    double value = 0.0;
    while (std::getline(ss, token, ',')) {
      if (col < value_col && col < 5) {
        key += token;
        key += '|';
      }
      if (col == value_col) value = std::stod(token);
      ++col;
    }
    set.values[key] = value;
  }
  if (set.values.empty()) {
    throw Error(Error::Code::bad_config, path + " contains no data rows");
  }
  return set;
}

int cmd_stats(const std::vector<std::string>& inputs, const std::string& out, int reps,
              int subset_size, std::uint64_t seed) {
  if (inputs.size() < 2) {
    throw Error(Error::Code::bad_config, "need at least two result sets to compare");
  }
  if (reps <= 0) {
    throw Error(Error::Code::bad_config, "bootstrap reps must be > 0");
  }
  std::vector<ResultSet> sets;
  for (const std::string& path : inputs) sets.push_back(load_result_set(path));

  std::ostringstream csv;
  csv << "set_a,set_b,n_paired,p_signed_rank,boot_reps,boot_subset,boot_fraction_significant,"
         "boot_median_p\n";
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      std::vector<double> xs, ys;
      for (const auto& [key, value] : sets[a].values) {
        const auto it = sets[b].values.find(key);
        if (it != sets[b].values.end()) {
          xs.push_back(value);
          ys.push_back(it->second);
        }
      }
      if (xs.empty()) {
        throw Error(Error::Code::bad_config,
                    "no matching rows between " + sets[a].path + " and " + sets[b].path);
      }
      const double p = wilcoxon_signed_rank(xs, ys);
      const int subset =
          subset_size > 0 ? subset_size : std::max(1, static_cast<int>(xs.size()) / 2);
      const BootstrapSummary boot =
          bootstrap_compare(xs, ys, reps, subset, derive_seed(seed, a * 1000 + b));
      csv << sets[a].path << ',' << sets[b].path << ',' << xs.size() << ',' << format_number(p)
          << ',' << boot.reps << ',' << subset << ',' << format_number(boot.fraction_significant)
          << ',' << format_number(boot.median_p) << '\n';
    }
  }
  std::ofstream out_file(out);
  if (!out_file) throw Error(Error::Code::unwritable_path, "cannot write " + out);
  out_file << csv.str();
  std::printf("wrote pairwise statistics to %s\n", out.c_str());
  return 0;
}

int cmd_actuate_check(const std::string& table_file, const std::string& label_name_arg) {
  const LookupTable table =
      table_file.empty() ? default_lookup_table() : load_lookup_table(table_file);
  validate_table(table);
  std::vector<Label> labels;
  if (label_name_arg.empty()) {
    labels = {Label::TG, Label::PG, Label::Open, Label::Rest};
  } else {
    labels = {label_from_name(label_name_arg)};
  }
  for (Label label : labels) {
    const DacCommand c = command_for(label, table);
    const auto frame = encode_command(c);
    const char* channel = c.channel == DacCommand::Channel::none
                              ? "none"
                              : (c.channel == DacCommand::Channel::open ? "open" : "close");
    std::printf("%-4s %-5s %4d mV %4d ms  frame=", label_name(label), channel, c.millivolts,
                c.duration_ms);
    for (std::uint8_t b : frame) std::printf("%02X", b);
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offline EEG grasp-type decoding toolbox"};
  app.set_config("--config", "", "read options from an INI file");
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic epoch file");
  std::string synth_out, synth_layout = "openbci16";
  int synth_trials = 30;
  double synth_rate = 250.0, synth_move_gain = 1.0, synth_rest_gain = 0.2, synth_sigma = 1.0;
  double synth_separation = 0.25;
  std::uint64_t synth_seed = 1;
  synth->add_option("--out", synth_out, "output epoch file")->required();
  synth->add_option("--layout", synth_layout, "acticap63 or openbci16");
  synth->add_option("--trials-per-class", synth_trials, "original trials per class");
  synth->add_option("--rate", synth_rate, "sample rate (125 or 250)");
  synth->add_option("--movement-gain", synth_move_gain, "band gain of the movement classes");
  synth->add_option("--rest-gain", synth_rest_gain, "band gain of the Rest class");
  synth->add_option("--noise-sigma", synth_sigma, "white noise floor");
  synth->add_option("--pattern-separation", synth_separation,
                    "spatial separation of the movement patterns");
  synth->add_option("--seed", synth_seed, "generator seed");

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "resample, filter, augment, normalize");
  std::string pre_in, pre_out, pre_audit;
  double pre_rate = 0.0, pre_notch_hz = 50.0, pre_notch_q = 35.0, pre_lo = 8.0, pre_hi = 30.0;
  bool pre_no_notch = false, pre_no_bandpass = false, pre_no_normalize = false;
  int pre_augment = 0;
  std::uint64_t pre_augment_seed = 1;
  pre->add_option("--in", pre_in, "input epoch file")->required();
  pre->add_option("--out", pre_out, "output epoch file")->required();
  pre->add_option("--target-rate", pre_rate, "decimate to this rate (0 = keep)");
  pre->add_flag("--no-notch", pre_no_notch, "skip the notch filter");
  pre->add_option("--notch-hz", pre_notch_hz, "notch centre frequency");
  pre->add_option("--notch-q", pre_notch_q, "notch quality factor");
  pre->add_flag("--no-bandpass", pre_no_bandpass, "skip the bandpass filter");
  pre->add_option("--band-lo", pre_lo, "bandpass low edge");
  pre->add_option("--band-hi", pre_hi, "bandpass high edge");
  pre->add_option("--augment-to", pre_augment,
                  "augment every class to this count before normalization (0 = off)");
  pre->add_option("--augment-seed", pre_augment_seed, "augmentation seed");
  pre->add_flag("--no-normalize", pre_no_normalize, "skip robust normalization");
  pre->add_option("--audit-dir", pre_audit, "write normalization/augmentation parameters here");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "cross-validated per-pair evaluation");
  EvalFlags eval_flags;
  eval_flags.add_to(eval);

  // ablate
  auto* ablate = app.add_subcommand("ablate", "electrode-combination ablation");
  EvalFlags ablate_flags;
  ablate_flags.add_to(ablate);
  std::string ablate_combos = "0,1,2,3,4,5,6,7,8,9";
  std::string ablate_layout_file, ablate_handedness = "right";
  ablate->add_option("--combos", ablate_combos, "comma list of combination ids");
  ablate->add_option("--layout-file", ablate_layout_file, "layout/combination JSON file");
  ablate->add_option("--handedness", ablate_handedness, "right or left");

  // stats
  auto* stats = app.add_subcommand("stats", "pairwise Wilcoxon and bootstrap comparisons");
  std::vector<std::string> stats_inputs;
  std::string stats_out = "stats.csv";
  int stats_reps = 1000, stats_subset = 0;
  std::uint64_t stats_seed = 1;
  stats->add_option("--inputs", stats_inputs, "two or more results/folds CSV files")
      ->required()
      ->expected(-2);
  stats->add_option("--out", stats_out, "output CSV");
  stats->add_option("--reps", stats_reps, "bootstrap repetitions");
  stats->add_option("--subset-size", stats_subset, "subjects drawn per repetition (0 = half)");
  stats->add_option("--seed", stats_seed, "bootstrap seed");

  // actuate-check
  auto* act = app.add_subcommand("actuate-check", "validate a lookup table and print frames");
  std::string act_table, act_label;
  act->add_option("--table", act_table, "lookup table JSON (default: built-in)");
  act->add_option("--label", act_label, "restrict to one label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(synth_out, synth_layout, synth_trials, synth_rate, synth_move_gain,
                       synth_rest_gain, synth_sigma, synth_separation, synth_seed);
    }
    if (pre->parsed()) {
      return cmd_preprocess(pre_in, pre_out, pre_rate, pre_no_notch, pre_notch_hz, pre_notch_q,
                            pre_no_bandpass, pre_lo, pre_hi, pre_augment, pre_augment_seed,
                            pre_no_normalize, pre_audit);
    }
    if (eval->parsed()) return cmd_evaluate(eval_flags);
    if (ablate->parsed()) {
      return cmd_ablate(ablate_flags, ablate_combos, ablate_layout_file, ablate_handedness);
    }
    if (stats->parsed()) {
      return cmd_stats(stats_inputs, stats_out, stats_reps, stats_subset, stats_seed);
    }
    if (act->parsed()) return cmd_actuate_check(act_table, act_label);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return map_exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
