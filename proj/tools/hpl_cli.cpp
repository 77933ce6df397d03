// hpl: command-line front end.
//
//   hpl fit   CONFIG [--key value ...]
//   hpl eval  PREDICTIONS TRUTH [--mode standard|gzsl] [--m M] [--n N]
//   hpl synth SPEC OUTDIR [--key value ...]
//   hpl grid  CONFIG [--key value ...]
//
// Exit codes: 0 success, 1 validation failure, 2 numerical failure,
// 3 I/O or file-format failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpl/error.hpp"
#include "hpl/evaluation.hpp"
#include "hpl/io.hpp"
#include "hpl/solver.hpp"
#include "hpl/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using namespace hpl;

enum ExitCode { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

// ---------------------------------------------------------------------------
// Configuration documents.
// ---------------------------------------------------------------------------

// Every key a run configuration may carry, with its default.
json default_run_config() {
  const HyperParams hp;
  const kernels::LineSearchParams& ls = hp.line_search;
  return json{{"manifest", nullptr},
              {"output_dir", "hpl-out"},
              {"repeats", 1},
              {"rho", hp.rho},
              {"omega", hp.omega},
              {"alpha", hp.alpha},
              {"theta", hp.theta},
              {"mode", std::string(to_string(hp.mode))},
              {"epsilon", hp.epsilon},
              {"max_outer", hp.max_outer},
              {"max_inner_unseen", hp.max_inner_unseen},
              {"max_inner_seen", hp.max_inner_seen},
              {"inner_tol", hp.inner_tol},
              {"ridge_tau", nullptr},
              {"init_strategy", std::string(to_string(hp.init))},
              {"kmeans_restarts", hp.kmeans_restarts},
              {"seed", hp.seed},
              {"inductive_warm_start", hp.inductive_warm_start},
              {"line_search_step0", ls.step0},
              {"line_search_shrink", ls.shrink},
              {"line_search_c1", ls.c1},
              {"line_search_max_steps", ls.max_steps},
              {"line_search_max_shrinks", ls.max_shrinks},
              {"line_search_tol", ls.tol}};
}

json default_synth_spec() {
  const SynthSpec s;
  return json{{"d", s.d},
              {"k", s.k},
              {"q", s.q},
              {"m", s.m},
              {"n", s.n},
              {"samples_per_class", s.samples_per_class},
              {"samples_per_unseen_class", s.samples_per_unseen_class},
              {"seen_test_per_class", s.seen_test_per_class},
              {"noise_sigma", s.noise_sigma},
              {"separation", s.separation},
              {"seed", s.seed}};
}

json read_json_file(const fs::path& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what(),
                      static_cast<std::size_t>(e.byte));
  }
}

// Command-line values are JSON literals when they parse as one, else strings.
json parse_override(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

// Defaults, then the file, then command-line overrides. Unknown keys are rejected.
json merge_config(const json& defaults, const json& file, const std::map<std::string, std::string>& overrides,
                  const std::string& what) {
  if (!file.is_object()) throw ValidationError(what + " must be a JSON object");
  json out = defaults;
  for (const auto& [key, value] : file.items()) {
    if (!defaults.contains(key)) throw ValidationError(what + ": unknown field '" + key + "'");
    out[key] = value;
  }
  for (const auto& [key, value] : overrides) out[key] = parse_override(value);
  return out;
}

double get_real(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number()) throw ValidationError("field '" + key + "' must be a number");
  return v.get<double>();
}

long long get_int(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ValidationError("field '" + key + "' must be an integer");
  }
  return v.get<long long>();
}

int get_count(const json& doc, const std::string& key) {
  const long long v = get_int(doc, key);
  if (v < 0 || v > 1'000'000'000) throw ValidationError("field '" + key + "' must be a nonnegative count");
  return static_cast<int>(v);
}

bool get_bool(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_boolean()) throw ValidationError("field '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_string()) throw ValidationError("field '" + key + "' must be a string");
  return v.get<std::string>();
}

// Rethrows a library range error with the offending field named.
template <typename F>
auto field(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError("field '" + key + "': " + e.what());
  }
}

HyperParams hyperparams_from(const json& doc) {
  HyperParams hp;
  hp.rho = get_real(doc, "rho");
  hp.omega = get_real(doc, "omega");
  hp.alpha = get_real(doc, "alpha");
  hp.theta = get_real(doc, "theta");
  hp.mode = field("mode", [&] { return parse_mode(get_string(doc, "mode")); });
  hp.epsilon = get_real(doc, "epsilon");
  hp.max_outer = get_count(doc, "max_outer");
  hp.max_inner_unseen = get_count(doc, "max_inner_unseen");
  hp.max_inner_seen = get_count(doc, "max_inner_seen");
  hp.inner_tol = get_real(doc, "inner_tol");
  if (!doc.at("ridge_tau").is_null()) hp.ridge_tau = get_real(doc, "ridge_tau");
  hp.init = field("init_strategy", [&] { return parse_init_kind(get_string(doc, "init_strategy")); });
  hp.kmeans_restarts = get_count(doc, "kmeans_restarts");
  const long long seed = get_int(doc, "seed");
  if (seed < 0) throw ValidationError("field 'seed' must be nonnegative");
  hp.seed = static_cast<unsigned long long>(seed);
  hp.inductive_warm_start = get_bool(doc, "inductive_warm_start");
  hp.line_search.step0 = get_real(doc, "line_search_step0");
  hp.line_search.shrink = get_real(doc, "line_search_shrink");
  hp.line_search.c1 = get_real(doc, "line_search_c1");
  hp.line_search.max_steps = get_count(doc, "line_search_max_steps");
  hp.line_search.max_shrinks = get_count(doc, "line_search_max_shrinks");
  hp.line_search.tol = get_real(doc, "line_search_tol");
  hp.validate();
  if (!(hp.line_search.shrink > 0.0 && hp.line_search.shrink < 1.0)) {
    throw ValidationError("field 'line_search_shrink' must lie in (0, 1)");
  }
  if (!(hp.line_search.c1 > 0.0 && hp.line_search.c1 < 1.0)) {
    throw ValidationError("field 'line_search_c1' must lie in (0, 1)");
  }
  if (!(hp.line_search.step0 > 0.0)) throw ValidationError("field 'line_search_step0' must be positive");
  if (!(hp.line_search.tol >= 0.0)) throw ValidationError("field 'line_search_tol' must be nonnegative");
  return hp;
}

struct RunConfig {
  json doc;  // resolved configuration, echoed into summaries
  fs::path manifest;
  fs::path output_dir;
  int repeats = 1;
  HyperParams hp;
};

RunConfig run_config_from(const json& doc, const fs::path& config_dir) {
  RunConfig rc;
  rc.doc = doc;
  if (doc.at("manifest").is_null()) throw ValidationError("field 'manifest' is required");
  rc.manifest = get_string(doc, "manifest");
  if (rc.manifest.is_relative()) rc.manifest = config_dir / rc.manifest;
  rc.output_dir = get_string(doc, "output_dir");
  rc.repeats = get_count(doc, "repeats");
  if (rc.repeats < 1) throw ValidationError("field 'repeats' must be at least 1");
  rc.hp = hyperparams_from(doc);
  return rc;
}

fs::path parent_dir(const fs::path& file) {
  const fs::path parent = fs::absolute(file).parent_path();
  return parent.empty() ? fs::current_path() : parent;
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

json report_json(const EvalReport& r, bool with_classes, int class_offset = 0) {
  json out;
  out["acc_unseen"] = r.acc_unseen;
  if (r.acc_seen) out["acc_seen"] = *r.acc_seen;
  if (r.harmonic_mean) out["harmonic_mean"] = *r.harmonic_mean;
  if (with_classes) {
    json rows = json::array();
    for (const auto& [cls, score] : r.per_class) {
      rows.push_back(json{{"class", cls + 1 + class_offset},
                          {"correct", score.correct},
                          {"total", score.total},
                          {"accuracy", score.accuracy}});
    }
    out["per_class"] = rows;
  }
  return out;
}

// Scores predictions against the unseen set's truth. GZSL predictions and
// truth over all classes use the generalized report; unseen-only predictions
// against an all-class pool are lifted past the m seen classes first.
std::optional<EvalReport> evaluate_fit(const Labels& predicted, const UnlabeledFeatureSet& unseen, int m, Mode mode) {
  if (!unseen.truth()) return std::nullopt;
  const int n = unseen.num_classes();
  Labels truth = *unseen.truth();
  const bool all_truth = unseen.truth_space() == TruthSpace::kAll;
  if (mode == Mode::kGzsl) {
    if (!all_truth) {
      for (int& t : truth) t += m;
    }
    return evaluate_gzsl(predicted, truth, m, n);
  }
  if (!all_truth) return evaluate_standard(predicted, truth);
  Labels lifted = predicted;
  for (int& p : lifted) p += m;
  return evaluate_gzsl(lifted, truth, m, n);
}

// Grid and summary score: H for generalized reports, Acc_U otherwise.
double headline(const EvalReport& r) { return r.harmonic_mean ? *r.harmonic_mean : r.acc_unseen; }

std::string history_csv(const FitHistory& h) {
  std::string out = "iteration,objective,err1,err2\n";
  char line[128];
  for (std::size_t t = 0; t < h.objective_per_outer.size(); ++t) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", t + 1, h.objective_per_outer[t],
                  h.err1_per_outer[t], h.err2_per_outer[t]);
    out += line;
  }
  return out;
}

void save_state(const ModelState& s, const fs::path& dir) {
  const std::pair<const char*, const Matrix*> blocks[] = {{"P_s", &s.Ps}, {"P_u", &s.Pu}, {"D_v", &s.Dv},
                                                          {"D_c", &s.Dc}, {"Z_s", &s.Zs}, {"Z_u", &s.Zu},
                                                          {"C_u", &s.Cu}};
  for (const auto& [name, m] : blocks) io::save_matrix(*m, dir / (std::string(name) + ".hplm"), io::MatrixFormat::kBinary);
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

struct RepeatOutcome {
  FitResult result;
  Labels predicted;
  double seconds = 0.0;
  std::optional<EvalReport> report;
};

RepeatOutcome run_repeat(const io::Dataset& data, HyperParams hp, int repeat) {
  hp.seed += static_cast<unsigned long long>(repeat);
  RepeatOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  out.result = fit(data.seen, data.unseen, hp);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.predicted = predicted_labels(out.result.state);
  out.report = evaluate_fit(out.predicted, data.unseen, data.seen.num_classes(), hp.mode);
  return out;
}

json mean_report(const std::vector<EvalReport>& reports) {
  json out;
  double u = 0.0, s = 0.0, h = 0.0;
  bool has_seen = true, has_h = true;
  for (const EvalReport& r : reports) {
    u += r.acc_unseen;
    has_seen = has_seen && r.acc_seen.has_value();
    has_h = has_h && r.harmonic_mean.has_value();
    if (r.acc_seen) s += *r.acc_seen;
    if (r.harmonic_mean) h += *r.harmonic_mean;
  }
  const double count = static_cast<double>(reports.size());
  out["acc_unseen"] = u / count;
  if (has_seen) out["acc_seen"] = s / count;
  if (has_h) out["harmonic_mean"] = h / count;
  return out;
}

int cmd_fit(const RunConfig& rc) {
  const io::Dataset data = io::load_dataset(io::load_manifest(rc.manifest));
  make_dirs(rc.output_dir);

  json repeats = json::array();
  std::vector<EvalReport> reports;
  double total_seconds = 0.0;
  bool all_converged = true;
  for (int r = 0; r < rc.repeats; ++r) {
    const RepeatOutcome run = run_repeat(data, rc.hp, r);
    const fs::path dir = rc.output_dir / ("repeat_" + std::to_string(r));
    make_dirs(dir);
    save_state(run.result.state, dir);
    io::save_labels(run.predicted, dir / "predictions.csv");
    io::write_file_atomic(dir / "history.csv", history_csv(run.result.history));

    const FitHistory& h = run.result.history;
    json entry{{"repeat", r},
               {"seed", rc.hp.seed + static_cast<unsigned long long>(r)},
               {"seconds", run.seconds},
               {"converged", h.converged},
               {"outer_iterations", h.outer_iterations},
               {"final_objective", h.objective_per_outer.empty() ? json(nullptr) : json(h.objective_per_outer.back())}};
    if (run.report) {
      entry["eval"] = report_json(*run.report, false);
      reports.push_back(*run.report);
    }
    repeats.push_back(entry);
    total_seconds += run.seconds;
    all_converged = all_converged && h.converged;

    std::cerr << "repeat " << r + 1 << "/" << rc.repeats << ": " << (h.converged ? "converged" : "stopped")
              << " after " << h.outer_iterations << " outer iterations in " << run.seconds << " s";
    if (run.report) std::cerr << ", score " << headline(*run.report);
    std::cerr << "\n";
  }

  json summary{{"command", "fit"}, {"config", rc.doc}, {"seconds", total_seconds}, {"converged", all_converged}};
  if (!reports.empty()) summary["eval"] = mean_report(reports);
  summary["repeats"] = repeats;
  io::write_file_atomic(rc.output_dir / "summary.json", dump(summary));
  return kOk;
}

int cmd_eval(const fs::path& predictions, const fs::path& truth_path, const std::string& mode, int m, int n) {
  const Labels predicted = io::load_labels(predictions);
  const Labels truth = io::load_labels(truth_path);
  if (predicted.size() != truth.size()) {
    throw ValidationError("predictions have " + std::to_string(predicted.size()) + " entries but truth has " +
                          std::to_string(truth.size()));
  }
  json out;
  if (mode == "gzsl") {
    if (m < 1 || n < 1) throw ValidationError("gzsl evaluation needs --m and --n");
    out = json{{"mode", "gzsl"}, {"m", m}, {"n", n}};
    out.update(report_json(evaluate_gzsl(predicted, truth, m, n), true));
  } else if (mode == "standard") {
    const int limit = n > 0 ? n : std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] >= limit || predicted[i] >= limit) {
        throw ValidationError("label at line " + std::to_string(i + 1) + " exceeds n = " + std::to_string(n));
      }
    }
    out = json{{"mode", "standard"}};
    out.update(report_json(evaluate_standard(predicted, truth), true));
  } else {
    throw ValidationError("--mode must be 'standard' or 'gzsl'");
  }
  std::cout << dump(out);
  return kOk;
}

SynthSpec synth_spec_from(const json& doc) {
  SynthSpec s;
  s.d = get_count(doc, "d");
  s.k = get_count(doc, "k");
  s.q = get_count(doc, "q");
  s.m = get_count(doc, "m");
  s.n = get_count(doc, "n");
  s.samples_per_class = get_count(doc, "samples_per_class");
  s.samples_per_unseen_class = get_count(doc, "samples_per_unseen_class");
  s.seen_test_per_class = get_count(doc, "seen_test_per_class");
  s.noise_sigma = get_real(doc, "noise_sigma");
  s.separation = get_real(doc, "separation");
  const long long seed = get_int(doc, "seed");
  if (seed < 0) throw ValidationError("field 'seed' must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.validate();
  return s;
}

int cmd_synth(const json& doc, const fs::path& out) {
  const SynthSpec spec = synth_spec_from(doc);
  const SynthData data = synth_generate(spec);
  make_dirs(out / "truth");

  io::save_matrix(data.seen.features(), out / "X_s.hplm", io::MatrixFormat::kBinary);
  io::save_labels(data.seen.labels(), out / "labels_s.csv");
  io::save_matrix(data.seen.semantics(), out / "Y_s.hplm", io::MatrixFormat::kBinary);
  io::save_matrix(data.unseen.features(), out / "X_u.hplm", io::MatrixFormat::kBinary);
  io::save_matrix(data.unseen.semantics(), out / "Y_u.hplm", io::MatrixFormat::kBinary);
  io::save_labels(*data.unseen.truth(), out / "truth_u.csv");
  save_state(data.truth, out / "truth");

  io::DatasetManifest manifest;
  manifest.features_seen = {out / "X_s.hplm", io::MatrixFormat::kBinary};
  manifest.labels_seen = out / "labels_s.csv";
  manifest.semantics_seen = {out / "Y_s.hplm", io::MatrixFormat::kBinary};
  manifest.features_unseen = {out / "X_u.hplm", io::MatrixFormat::kBinary};
  manifest.semantics_unseen = {out / "Y_u.hplm", io::MatrixFormat::kBinary};
  manifest.truth_unseen = out / "truth_u.csv";
  manifest.truth_space = data.unseen.truth_space();
  manifest.normalize = true;
  io::write_file_atomic(out / "manifest.json", io::manifest_to_json(manifest, out));
  io::write_file_atomic(out / "synth_spec.json", dump(doc));
  std::cerr << "wrote " << spec.m << " seen and " << spec.n << " unseen classes to " << out.string() << "\n";
  return kOk;
}

std::vector<double> grid_axis(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) throw ValidationError("grid field '" + key + "' must be a number or a non-empty list");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ValidationError("grid field '" + key + "' must hold numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

int cmd_grid(const json& doc, const fs::path& config_dir) {
  const std::vector<double> rhos = grid_axis(doc, "rho");
  const std::vector<double> omegas = grid_axis(doc, "omega");
  const std::vector<double> alphas = grid_axis(doc, "alpha");
  const std::vector<double> thetas = grid_axis(doc, "theta");

  // Validate the scalar part once with the first grid point.
  json point = doc;
  point["rho"] = rhos.front();
  point["omega"] = omegas.front();
  point["alpha"] = alphas.front();
  point["theta"] = thetas.front();
  const RunConfig base = run_config_from(point, config_dir);
  const io::Dataset data = io::load_dataset(io::load_manifest(base.manifest));
  if (!data.unseen.truth()) throw ValidationError("grid needs truth labels ('truth_u') in the validation manifest");
  make_dirs(base.output_dir);

  struct Row {
    double rho, omega, alpha, theta, acc;
  };
  std::vector<Row> rows;
  for (double rho : rhos) {
    for (double omega : omegas) {
      for (double alpha : alphas) {
        for (double theta : thetas) {
          point["rho"] = rho;
          point["omega"] = omega;
          point["alpha"] = alpha;
          point["theta"] = theta;
          const HyperParams hp = hyperparams_from(point);
          double acc = 0.0;
          for (int r = 0; r < base.repeats; ++r) acc += headline(*run_repeat(data, hp, r).report) / base.repeats;
          rows.push_back({rho, omega, alpha, theta, acc});
          std::cerr << "rho " << rho << " omega " << omega << " alpha " << alpha << " theta " << theta << ": " << acc
                    << "\n";
        }
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.acc > b.acc; });

  auto format_row = [](const Row& r) {
    char line[256];
    std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g,%.10g\n", r.rho, r.omega, r.alpha, r.theta, r.acc);
    return std::string(line);
  };
  const std::string header = "rho,omega,alpha,theta,acc\n";
  std::string csv = header;
  for (const Row& r : rows) csv += format_row(r);
  io::write_file_atomic(base.output_dir / "grid.csv", csv);
  std::cout << header << format_row(rows.front());
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point.
// ---------------------------------------------------------------------------

// Registers `--key value` for every key of `defaults`.
void add_overrides(CLI::App* cmd, const json& defaults, std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : defaults.items()) {
    const std::string name = key;
    cmd->add_option_function<std::string>(
        "--" + name, [&overrides, name](const std::string& v) { overrides[name] = v; },
        "override '" + name + "' (default " + value.dump() + ")");
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Hierarchical prototype learning for zero-shot recognition"};
  app.require_subcommand(1);

  std::map<std::string, std::string> overrides;
  std::string config_path;
  std::string spec_path;
  std::string synth_out;
  std::string predictions, truth, eval_mode = "standard";
  int eval_m = 0, eval_n = 0;

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model on a dataset manifest");
  fit_cmd->add_option("config", config_path, "run configuration (JSON)")->required();
  add_overrides(fit_cmd, default_run_config(), overrides);

  CLI::App* grid_cmd = app.add_subcommand("grid", "grid search rho/omega/alpha/theta on a validation manifest");
  grid_cmd->add_option("config", config_path, "run configuration with lists for rho/omega/alpha/theta")->required();
  add_overrides(grid_cmd, default_run_config(), overrides);

  CLI::App* eval_cmd = app.add_subcommand("eval", "score predicted labels against truth");
  eval_cmd->add_option("predictions", predictions, "predicted 1-based labels, one per line")->required();
  eval_cmd->add_option("truth", truth, "true 1-based labels, one per line")->required();
  eval_cmd->add_option("--mode", eval_mode, "standard or gzsl");
  eval_cmd->add_option("--m", eval_m, "number of seen classes (gzsl)");
  eval_cmd->add_option("--n", eval_n, "number of unseen classes");

  CLI::App* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset and its manifest");
  synth_cmd->add_option("spec", spec_path, "synthetic spec (JSON); use {} for defaults")->required();
  synth_cmd->add_option("outdir", synth_out, "output directory")->required();
  add_overrides(synth_cmd, default_synth_spec(), overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  if (fit_cmd->parsed() || grid_cmd->parsed()) {
    const json file = read_json_file(config_path);
    const json doc = merge_config(default_run_config(), file, overrides, "config");
    const fs::path dir = parent_dir(config_path);
    if (fit_cmd->parsed()) return cmd_fit(run_config_from(doc, dir));
    return cmd_grid(doc, dir);
  }
  if (eval_cmd->parsed()) return cmd_eval(predictions, truth, eval_mode, eval_m, eval_n);
  const json doc = merge_config(default_synth_spec(), read_json_file(spec_path), overrides, "synth spec");
  return cmd_synth(doc, synth_out);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hpl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const hpl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const hpl::GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const hpl::SingularityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
