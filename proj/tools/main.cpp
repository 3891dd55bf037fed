// Command-line front end: generate | fit | code | eval | bench.
//
// Exit codes: 0 success, 2 config error, 3 I/O failure, 4 solver failure.
// Flag precedence: CLI > --config file > built-in defaults; the effective
// configuration is echoed into run_manifest.json in the output directory.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spd/dict_learner.hpp"
#include "spd/harness.hpp"
#include "spd/parallel.hpp"
#include "spd/serialization.hpp"
#include "spd/sparse_coder.hpp"
#include "spd/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolver = 4;

struct ConfigError : Error {
  using Error::Error;
};

using clock_t_ = std::chrono::steady_clock;

double ms_since(clock_t_::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_t_::now() - t0).count();
}

bool g_verbose = false;

void vlog(const std::string& msg) {
  if (g_verbose) std::cerr << "[spdcoder] " << msg << "\n";
}

/// Apply config-file values to options the user did not set on the CLI.
void apply_config_file(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  if (!fs::exists(config_path)) {
    throw ConfigError("config: file does not exist: " + config_path);
  }
  const json cfg = io::load_json_file(config_path);
  if (!cfg.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr || opt->count() > 0) continue;  // unknown key or CLI wins
    std::vector<std::string> vals;
    if (value.is_array()) {
      for (const auto& v : value) {
        vals.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else {
      vals.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
    opt->add_result(vals.size() == 1 ? vals[0] : CLI::detail::join(vals, ","));
    opt->run_callback();
  }
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("config: field '" + field + "' " + what);
}

void require_input(const std::string& path, const std::string& field) {
  require(!path.empty(), field, "is required");
  if (!fs::exists(path)) {
    throw ConfigError("config: field '" + field + "' refers to a missing path: " + path);
  }
}

fs::path ensure_out_dir(const std::string& out) {
  require(!out.empty(), "out", "is required");
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out);
  return dir;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    std::uint64_t seed, const json& effective,
                    const json& extra = json::object()) {
  json manifest{{"tool", "spdcoder"},
                {"version", kVersion},
                {"command", command},
                {"seed", seed},
                {"config", effective}};
  for (const auto& [k, v] : extra.items()) manifest[k] = v;
  io::save_json_file((out_dir / "run_manifest.json").string(), manifest);
}

json splits_to_json(const Splits& s) {
  return json{{"train", s.train}, {"gallery", s.gallery}, {"query", s.query}};
}

Splits splits_from_json(const json& j) {
  Splits s;
  s.train = j.at("train").get<std::vector<Index>>();
  s.gallery = j.at("gallery").get<std::vector<Index>>();
  s.query = j.at("query").get<std::vector<Index>>();
  return s;
}

struct LoadedDataset {
  LabeledDataset data;
  json manifest;
  fs::path dir;
};

/// A dataset artifact is a manifest JSON next to its binary container.
LoadedDataset load_dataset(const std::string& manifest_path) {
  LoadedDataset out;
  out.manifest = io::load_json_file(manifest_path);
  out.dir = fs::path(manifest_path).parent_path();
  const std::string rel = out.manifest.at("files").at("matrices").get<std::string>();
  const fs::path bin = out.dir / rel;
  if (!fs::exists(bin)) throw IoError("dataset container missing: " + bin.string());
  io::DatasetPayload payload = io::read_dataset_file(bin.string(), PdPolicy::clamp);
  out.data.items = std::move(payload.items);
  out.data.labels = std::move(payload.labels);
  out.data.splits = splits_from_json(out.manifest.at("splits"));
  return out;
}

std::vector<Index> split_indices(const LabeledDataset& ds, const std::string& split) {
  if (split == "train") return ds.splits.train;
  if (split == "gallery") return ds.splits.gallery;
  if (split == "query") return ds.splits.query;
  if (split == "all") {
    std::vector<Index> all(ds.items.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
    return all;
  }
  throw ConfigError("config: field 'split' must be train|gallery|query|all");
}

/// Sparse-code a list of items against a dictionary, in parallel.
std::vector<io::CodeRecord> code_batch(const LabeledDataset& ds,
                                       const std::vector<Index>& idx, const Dictionary& dict,
                                       double lambda, const SpgConfig& cfg, int threads) {
  std::vector<io::CodeRecord> records(idx.size());
  parallel_for(idx.size(), threads, [&](std::size_t k) {
    const Index j = idx[k];
    SpgResult r = spg_solve(ds.items[static_cast<std::size_t>(j)], dict, lambda, cfg);
    io::CodeRecord rec;
    rec.index = static_cast<long>(j);
    rec.label = ds.labels[static_cast<std::size_t>(j)];
    rec.coeffs = r.code.coeffs;
    rec.objective = r.objective;
    rec.iterations = static_cast<int>(r.report.iterations.size());
    rec.wall_ms = r.report.total_wall_ms;
    records[k] = std::move(rec);
  });
  return records;
}

// ---------------------------------------------------------------------------

int cmd_generate(const std::string& mode, Index dim, Index count, Index atoms,
                 Index active, Index classes, double noise, double coeff_lo,
                 double coeff_hi, Index samples_per_cov, std::uint64_t seed,
                 const std::string& out, bool emit_json, const json& effective) {
  require(dim >= 1, "dim", "must be >= 1");
  require(count >= 1, "data", "must be >= 1");
  require(mode == "planted" || mode == "gaussian", "mode", "must be planted|gaussian");
  const fs::path out_dir = ensure_out_dir(out);
  const auto t0 = clock_t_::now();

  io::DatasetPayload payload;
  json dataset_manifest{{"format_version", 1}, {"kind", mode}};
  Splits splits;

  if (mode == "planted") {
    require(atoms >= 1, "atoms", "must be >= 1");
    require(active >= 1 && active <= atoms, "active", "must be in [1, atoms]");
    require(coeff_lo > 0.0 && coeff_hi >= coeff_lo, "coeff-lo", "must satisfy 0 < lo <= hi");
    PlantedSpec spec;
    spec.dim = dim;
    spec.n_atoms = atoms;
    spec.n_data = count;
    spec.active = active;
    spec.classes = classes;
    spec.coeff_lo = coeff_lo;
    spec.coeff_hi = coeff_hi;
    spec.noise_scale = noise;
    spec.seed = seed;
    vlog("generating planted dataset");
    PlantedData planted = gen_planted_dataset(spec);
    payload.items = planted.dataset.items;
    payload.labels = planted.dataset.labels;
    splits = planted.dataset.splits;

    io::write_dictionary_file((out_dir / "dict_true.spdd").string(), planted.dictionary);
    std::vector<io::CodeRecord> true_codes(planted.true_codes.size());
    for (std::size_t j = 0; j < planted.true_codes.size(); ++j) {
      true_codes[j].index = static_cast<long>(j);
      true_codes[j].label = planted.dataset.labels[j];
      true_codes[j].coeffs = planted.true_codes[j];
    }
    io::write_codes_file((out_dir / "codes_true.jsonl").string(), true_codes);
    dataset_manifest["files"]["dict_true"] = "dict_true.spdd";
    dataset_manifest["files"]["codes_true"] = "codes_true.jsonl";
  } else {
    SyntheticSpec spec;
    spec.dim = dim;
    spec.n_samples = count;
    spec.samples_per_cov = samples_per_cov;
    spec.seed = seed;
    vlog("generating gaussian covariances");
    payload.items = gen_gaussian_covariances(spec);
    payload.labels.assign(payload.items.size(), 0);
    splits = make_splits(payload.labels, seed);
  }

  io::write_dataset_file((out_dir / "dataset.spds").string(), payload);
  dataset_manifest["files"]["matrices"] = "dataset.spds";
  dataset_manifest["dim"] = dim;
  dataset_manifest["count"] = count;
  dataset_manifest["spec"] = effective;
  dataset_manifest["splits"] = splits_to_json(splits);
  io::save_json_file((out_dir / "dataset.json").string(), dataset_manifest);
  if (emit_json) {
    io::save_json_file((out_dir / "dataset_data.json").string(),
                       io::dataset_to_json(payload));
  }

  write_manifest(out_dir, "generate", seed, effective,
                 json{{"wall_ms", ms_since(t0)},
                      {"outputs", {"dataset.json", "dataset.spds"}}});
  std::cout << "generated " << count << " matrices (dim " << dim << ") -> "
            << (out_dir / "dataset.json").string() << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& data_path, Index n_atoms, double lambda,
            double lambda_dict, const std::string& init, int outer_max, double outer_tol,
            int cg_max, int spg_max, int threads, std::uint64_t seed,
            const std::string& out, const json& effective) {
  require_input(data_path, "data");
  require(n_atoms >= 1, "atoms", "must be >= 1");
  require(lambda >= 0.0, "lambda", "must be >= 0");
  require(lambda_dict >= 0.0, "lambda-dict", "must be >= 0");
  require(outer_max >= 1, "outer-max", "must be >= 1");
  require(threads >= 1, "threads", "must be >= 1");
  const std::map<std::string, InitStrategy> inits{
      {"riem-kmeans", InitStrategy::riem_kmeans},
      {"le-kmeans", InitStrategy::le_kmeans},
      {"frob-kmeans", InitStrategy::frob_kmeans},
      {"random", InitStrategy::random}};
  require(inits.count(init) > 0, "init", "must be riem-kmeans|le-kmeans|frob-kmeans|random");
  const fs::path out_dir = ensure_out_dir(out);
  const auto t0 = clock_t_::now();

  LoadedDataset ds = load_dataset(data_path);
  const std::vector<SpdMatrix> train = ds.data.subset(ds.data.splits.train);
  require(static_cast<std::size_t>(n_atoms) <= train.size(), "atoms",
          "must not exceed the train split size");

  DlConfig cfg;
  cfg.lambda_dict = lambda_dict;
  cfg.outer_max_iter = outer_max;
  cfg.outer_tol = outer_tol;
  cfg.cg_max_iter = cg_max;
  cfg.sc.max_iter = spg_max;
  cfg.threads = threads;

  vlog("fitting dictionary on " + std::to_string(train.size()) + " training matrices");
  FitState fit = alternate_fit(train, n_atoms, lambda, cfg, inits.at(init), seed);

  io::write_dictionary_file((out_dir / "dictionary.spdd").string(), fit.dictionary);
  std::vector<io::CodeRecord> records(fit.codes.size());
  for (std::size_t k = 0; k < fit.codes.size(); ++k) {
    const Index j = ds.data.splits.train[k];
    records[k].index = static_cast<long>(j);
    records[k].label = ds.data.labels[static_cast<std::size_t>(j)];
    records[k].coeffs = fit.codes[k].coeffs;
    records[k].objective = 0.0;
    records[k].iterations = 0;
    records[k].wall_ms = 0.0;
  }
  io::write_codes_file((out_dir / "codes_train.jsonl").string(), records);

  json trace = json::array();
  for (const auto& [it, obj] : fit.objective_trace) trace.push_back({it, obj});
  write_manifest(out_dir, "fit", seed, effective,
                 json{{"objective_trace", trace},
                      {"converged", fit.converged},
                      {"outer_iterations", fit.outer_iterations},
                      {"wall_ms", json{{"total", ms_since(t0)},
                                       {"coding", fit.wall_ms_coding},
                                       {"dictionary", fit.wall_ms_dict}}},
                      {"outputs", {"dictionary.spdd", "codes_train.jsonl"}}});
  const double final_obj = fit.objective_trace.empty()
                               ? std::nan("")
                               : fit.objective_trace.back().second;
  std::cout << "fit finished: objective " << final_obj << " after "
            << fit.outer_iterations << " outer iterations"
            << (fit.converged ? " (converged)" : " (iteration cap)") << "\n";
  return kExitOk;
}

int cmd_code(const std::string& data_path, const std::string& dict_path,
             std::vector<double> lambdas, bool sweep, const std::string& split,
             int spg_max, int threads, std::uint64_t seed, const std::string& out,
             const json& effective) {
  require_input(data_path, "data");
  require_input(dict_path, "dict");
  require(threads >= 1, "threads", "must be >= 1");
  const fs::path out_dir = ensure_out_dir(out);
  const auto t0 = clock_t_::now();

  if (sweep) {
    lambdas.clear();
    for (int e = -5; e <= 5; ++e) lambdas.push_back(std::pow(10.0, e));
  }
  if (lambdas.empty()) lambdas.push_back(0.01);
  for (double l : lambdas) require(l >= 0.0, "lambda", "must be >= 0");

  LoadedDataset ds = load_dataset(data_path);
  const Dictionary dict = io::read_dictionary_file(dict_path);
  const std::vector<Index> idx = split_indices(ds.data, split);
  require(!idx.empty(), "split", "selects no items");

  SpgConfig cfg;
  cfg.max_iter = spg_max;

  json files = json::array();
  std::vector<std::vector<std::string>> sparsity_rows;
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const double lambda = lambdas[li];
    vlog("coding split '" + split + "' at lambda " + io::format_double(lambda));
    const auto records = code_batch(ds.data, idx, dict, lambda, cfg, threads);
    const std::string name = "codes_" + split + "_l" + std::to_string(li) + ".jsonl";
    io::write_codes_file((out_dir / name).string(), records);
    files.push_back({{"lambda", lambda}, {"file", name}});

    double mean_sparsity = 0.0;
    for (const auto& r : records) mean_sparsity += sparsity_fraction(r.coeffs);
    mean_sparsity /= static_cast<double>(records.size());
    sparsity_rows.push_back({io::format_double(lambda), io::format_double(mean_sparsity)});
  }
  if (lambdas.size() > 1) {
    io::write_csv_file((out_dir / "sparsity_vs_lambda.csv").string(),
                       {"lambda", "mean_sparsity"}, sparsity_rows);
  }

  write_manifest(out_dir, "code", seed, effective,
                 json{{"wall_ms", ms_since(t0)}, {"codes_files", files}});
  std::cout << "coded " << idx.size() << " matrices at " << lambdas.size()
            << " lambda value(s) -> " << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& gallery_path, const std::string& query_path, Index k_max,
             std::uint64_t seed, const std::string& out, const json& effective) {
  require_input(gallery_path, "gallery-codes");
  require_input(query_path, "query-codes");
  require(k_max >= 1, "k-max", "must be >= 1");
  const fs::path out_dir = ensure_out_dir(out);
  const auto t0 = clock_t_::now();

  const auto gallery = io::read_codes_file(gallery_path);
  const auto query = io::read_codes_file(query_path);
  require(!gallery.empty(), "gallery-codes", "is empty");
  require(!query.empty(), "query-codes", "is empty");

  std::vector<Vector> g_codes, q_codes;
  std::vector<int> g_labels, q_labels;
  for (const auto& r : gallery) {
    g_codes.push_back(r.coeffs);
    g_labels.push_back(r.label);
  }
  for (const auto& r : query) {
    q_codes.push_back(r.coeffs);
    q_labels.push_back(r.label);
  }

  std::vector<std::vector<std::string>> recall_rows;
  const Index k_hi = std::min<Index>(k_max, static_cast<Index>(g_codes.size()));
  for (Index k = 1; k <= k_hi; ++k) {
    const double r = recall_at_k(g_codes, q_codes, g_labels, q_labels, k);
    recall_rows.push_back({std::to_string(k), io::format_double(r)});
  }
  io::write_csv_file((out_dir / "recall_at_k.csv").string(), {"K", "recall"}, recall_rows);

  auto sparsity_summary = [](const std::vector<io::CodeRecord>& records) {
    double mean = 0.0;
    for (const auto& r : records) mean += sparsity_fraction(r.coeffs);
    return mean / static_cast<double>(records.size());
  };
  io::write_csv_file((out_dir / "sparsity_summary.csv").string(),
                     {"set", "count", "mean_sparsity"},
                     {{"gallery", std::to_string(gallery.size()),
                       io::format_double(sparsity_summary(gallery))},
                      {"query", std::to_string(query.size()),
                       io::format_double(sparsity_summary(query))}});

  write_manifest(out_dir, "eval", seed, effective,
                 json{{"wall_ms", ms_since(t0)},
                      {"outputs", {"recall_at_k.csv", "sparsity_summary.csv"}}});
  std::cout << "eval wrote recall@K (K=1.." << k_hi << ") -> "
            << (out_dir / "recall_at_k.csv").string() << "\n";
  return kExitOk;
}

int cmd_bench(std::vector<Index> dims, std::vector<Index> atoms, int reps,
              std::uint64_t seed, const std::string& out, const json& effective) {
  require(reps >= 1, "reps", "must be >= 1");
  for (Index d : dims) require(d >= 1, "dims", "entries must be >= 1");
  for (Index n : atoms) require(n >= 1, "atoms", "entries must be >= 1");
  const fs::path out_dir = ensure_out_dir(out);
  const auto t0 = clock_t_::now();

  vlog("running timing grids (single-threaded)");
  const auto rows = bench_timing(dims, atoms, reps, seed);
  std::vector<std::vector<std::string>> csv;
  for (const auto& r : rows) {
    csv.push_back({r.grid, std::to_string(r.dim), std::to_string(r.n_atoms),
                   std::to_string(r.reps), io::format_double(r.median_ms),
                   io::format_double(r.min_ms), io::format_double(r.max_ms)});
  }
  io::write_csv_file((out_dir / "bench.csv").string(),
                     {"grid", "dim", "n_atoms", "reps", "median_ms", "min_ms", "max_ms"},
                     csv);
  write_manifest(out_dir, "bench", seed, effective,
                 json{{"wall_ms", ms_since(t0)}, {"outputs", {"bench.csv"}}});
  std::cout << "bench wrote " << rows.size() << " rows -> "
            << (out_dir / "bench.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian dictionary learning and sparse coding for SPD matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // common flags replicated per subcommand so each one is self-contained
  struct Common {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 1;
    bool verbose = false;
  };
  auto add_common = [](CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON config file (CLI flags win)");
    cmd->add_option("--seed", c.seed, "global RNG seed");
    cmd->add_option("--out", c.out, "output directory (created if absent)");
    cmd->add_option("--threads", c.threads, "worker pool size (1 = sequential)");
    cmd->add_flag("--verbose", c.verbose, "log progress to stderr");
  };

  // generate
  auto* gen = app.add_subcommand("generate", "synthesize a dataset");
  Common gen_c;
  std::string gen_mode = "planted";
  Index gen_dim = 5, gen_count = 1000, gen_atoms = 100, gen_active = 10, gen_classes = 0;
  Index gen_spc = 0;
  double gen_noise = 0.0, gen_lo = 0.2, gen_hi = 1.0;
  bool gen_emit_json = false;
  add_common(gen, gen_c);
  gen->add_option("--mode", gen_mode, "planted|gaussian");
  gen->add_option("--dim", gen_dim, "matrix dimension");
  gen->add_option("--data", gen_count, "number of matrices");
  gen->add_option("--atoms", gen_atoms, "planted: dictionary size");
  gen->add_option("--active", gen_active, "planted: active support size");
  gen->add_option("--classes", gen_classes, "planted: shared supports (0 = per datum)");
  gen->add_option("--noise", gen_noise, "planted: SPD noise scale");
  gen->add_option("--coeff-lo", gen_lo, "planted: coefficient lower bound");
  gen->add_option("--coeff-hi", gen_hi, "planted: coefficient upper bound");
  gen->add_option("--samples-per-cov", gen_spc, "gaussian: vectors per covariance (0 = 10*dim)");
  gen->add_flag("--emit-json", gen_emit_json, "also write the full dataset as JSON");

  // fit
  auto* fit = app.add_subcommand("fit", "learn a dictionary by alternating minimization");
  Common fit_c;
  std::string fit_data, fit_init = "riem-kmeans";
  Index fit_atoms = 20;
  double fit_lambda = 0.01, fit_lambda_dict = 0.0, fit_outer_tol = 1e-6;
  int fit_outer_max = 50, fit_cg_max = 10, fit_spg_max = 100;
  add_common(fit, fit_c);
  fit->add_option("--data", fit_data, "dataset manifest JSON");
  fit->add_option("--atoms", fit_atoms, "dictionary size");
  fit->add_option("--lambda", fit_lambda, "sparsity weight");
  fit->add_option("--lambda-dict", fit_lambda_dict, "trace regularizer weight");
  fit->add_option("--init", fit_init, "riem-kmeans|le-kmeans|frob-kmeans|random");
  fit->add_option("--outer-max", fit_outer_max, "outer iteration cap");
  fit->add_option("--outer-tol", fit_outer_tol, "relative objective-decrease stop");
  fit->add_option("--cg-max", fit_cg_max, "CG iterations per dictionary update");
  fit->add_option("--spg-max", fit_spg_max, "SPG iterations per coding solve");

  // code
  auto* code = app.add_subcommand("code", "sparse-code a dataset against a dictionary");
  Common code_c;
  std::string code_data, code_dict, code_split = "all";
  std::vector<double> code_lambdas;
  bool code_sweep = false;
  int code_spg_max = 100;
  add_common(code, code_c);
  code->add_option("--data", code_data, "dataset manifest JSON");
  code->add_option("--dict", code_dict, "dictionary file (SPDD)");
  code->add_option("--lambda", code_lambdas, "sparsity weight (repeatable)");
  code->add_flag("--sweep", code_sweep, "sweep lambda over 1e-5..1e5 in decades");
  code->add_option("--split", code_split, "train|gallery|query|all");
  code->add_option("--spg-max", code_spg_max, "SPG iteration cap");

  // eval
  auto* eval = app.add_subcommand("eval", "retrieval and sparsity metrics from codes");
  Common eval_c;
  std::string eval_gallery, eval_query;
  Index eval_kmax = 25;
  add_common(eval, eval_c);
  eval->add_option("--gallery-codes", eval_gallery, "gallery codes JSONL");
  eval->add_option("--query-codes", eval_query, "query codes JSONL");
  eval->add_option("--k-max", eval_kmax, "largest K for recall@K");

  // bench
  auto* bench = app.add_subcommand("bench", "sparse-coding timing grids");
  Common bench_c;
  std::vector<Index> bench_dims{3, 5, 10, 20, 50, 100};
  std::vector<Index> bench_atoms{20, 50, 100, 200, 500, 1000};
  int bench_reps = 5;
  add_common(bench, bench_c);
  bench->add_option("--dims", bench_dims, "dimension grid (atom count fixed at 200)")
      ->delimiter(',');
  bench->add_option("--atoms", bench_atoms, "atom-count grid (dim fixed at 10)")
      ->delimiter(',');
  bench->add_option("--reps", bench_reps, "timed repetitions per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  CLI::App* active = app.get_subcommands().front();
  Common* common = gen->parsed() ? &gen_c
                   : fit->parsed() ? &fit_c
                   : code->parsed() ? &code_c
                   : eval->parsed() ? &eval_c
                                    : &bench_c;

  try {
    apply_config_file(active, common->config);
    g_verbose = common->verbose;

    // effective config: every option of the active subcommand after precedence
    json effective;
    for (const CLI::Option* opt : active->get_options()) {
      const std::string name = opt->get_name();
      if (name.rfind("--", 0) == 0 && name != "--config" && name != "--help") {
        const auto results = opt->results();
        if (results.size() == 1) {
          effective[name.substr(2)] = results.front();
        } else if (results.size() > 1) {
          effective[name.substr(2)] = results;
        }
      }
    }
    effective["seed"] = common->seed;
    effective["threads"] = common->threads;

    if (gen->parsed()) {
      return cmd_generate(gen_mode, gen_dim, gen_count, gen_atoms, gen_active,
                          gen_classes, gen_noise, gen_lo, gen_hi, gen_spc, gen_c.seed,
                          gen_c.out, gen_emit_json, effective);
    }
    if (fit->parsed()) {
      return cmd_fit(fit_data, fit_atoms, fit_lambda, fit_lambda_dict, fit_init,
                     fit_outer_max, fit_outer_tol, fit_cg_max, fit_spg_max,
                     fit_c.threads, fit_c.seed, fit_c.out, effective);
    }
    if (code->parsed()) {
      return cmd_code(code_data, code_dict, code_lambdas, code_sweep, code_split,
                      code_spg_max, code_c.threads, code_c.seed, code_c.out, effective);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_gallery, eval_query, eval_kmax, eval_c.seed, eval_c.out,
                      effective);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_dims, bench_atoms, bench_reps, bench_c.seed, bench_c.out,
                       effective);
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitSolver;
  }
}
