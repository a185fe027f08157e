#include "jod/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "jod/analysis.hpp"
#include "jod/dag.hpp"
#include "jod/dataset.hpp"
#include "jod/equivalence.hpp"
#include "jod/error.hpp"
#include "jod/io.hpp"
#include "jod/sampler.hpp"
#include "jod/scoring.hpp"
#include "jod/selection.hpp"
#include "jod/synth.hpp"

#ifndef JOD_PRESET_DIR
#define JOD_PRESET_DIR "presets"
#endif

namespace jod::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

json load_json(const fs::path& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_json(const fs::path& path, const json& j) { io::write_file(path, j.dump(2) + "\n"); }

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

json ordering_json(const Ordering& sigma) { return sigma.labels(); }

Ordering ordering_from_json(const json& j, int p) {
  if (!j.is_array()) throw ValidationError("ordering must be an array of labels");
  std::vector<int> labels;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ValidationError("ordering labels must be integers");
    labels.push_back(v.get<int>());
  }
  if (static_cast<int>(labels.size()) != p) throw ValidationError("ordering length differs from p");
  return Ordering::from_labels(labels);
}

json edges_json(std::span<const Edge> edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back({e.tail + 1, e.head + 1});
  return out;
}

std::string dag_text(const Dag& g) {
  std::ostringstream s;
  write_edge_list(s, g);
  return s.str();
}

Dag load_edge_list(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  return read_edge_list(in);
}

Dataset load_dataset(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  return read_dataset_csv(in);
}

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' is missing or has the wrong type");
  }
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_field<T>(j, key);
}

int resolve_threads(int requested) {
  if (const char* env = std::getenv("JOD_THREADS"); env && *env) {
    const long long v = io::parse_integer(env);
    if (v < 1) throw ValidationError("JOD_THREADS must be positive");
    return static_cast<int>(v);
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------- simulate

struct SimSettings {
  int p = 0;
  int K = 1;
  std::vector<int> n;
  std::string graph = "random";  // random | common_private
  double p_edge = 0.0;
  int n_common = 0;
  int n_private = 0;
  double low = 0.5;
  double high = 1.0;
  std::optional<double> target_u;
  int motifs = 0;
  std::uint64_t seed = 1;

  json to_json() const {
    json j{{"p", p},       {"K", K},         {"n_list", n},          {"graph", graph},
           {"low", low},   {"high", high},   {"unfaithful_motifs", motifs}, {"seed", seed}};
    if (graph == "random") j["p_edge"] = p_edge;
    if (graph == "common_private") {
      j["n_common"] = n_common;
      j["n_private"] = n_private;
    }
    j["target_u"] = target_u ? json(*target_u) : json(nullptr);
    return j;
  }
};

const std::vector<std::string> kSimKeys = {"p",        "K",         "n",           "n_list",       "n_total",
                                           "graph",    "p_edge",    "n_common",    "n_private",    "weight_range",
                                           "target_u", "unfaithful_motifs", "seed", "outdir", "description"};

SimSettings parse_sim_settings(const json& cfg) {
  if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (std::find(kSimKeys.begin(), kSimKeys.end(), key) == kSimKeys.end())
      throw ValidationError("unknown config field '" + key + "'");
  }
  SimSettings s;
  s.p = get_field<int>(cfg, "p");
  s.K = get_optional<int>(cfg, "K").value_or(1);
  if (s.p < 2) throw ValidationError("p must be at least 2");
  if (s.K < 1) throw ValidationError("K must be at least 1");

  if (auto list = get_optional<std::vector<int>>(cfg, "n_list")) {
    if (static_cast<int>(list->size()) != s.K) throw ValidationError("n_list must have K entries");
    s.n = *list;
  } else if (auto total = get_optional<int>(cfg, "n_total")) {
    s.n.assign(static_cast<std::size_t>(s.K), *total / s.K);
  } else {
    s.n.assign(static_cast<std::size_t>(s.K), get_optional<int>(cfg, "n").value_or(1000));
  }
  for (int n : s.n) {
    if (n < 2) throw ValidationError("every sample size must be at least 2");
  }

  s.graph = get_optional<std::string>(cfg, "graph").value_or("random");
  const int pairs = s.p * (s.p - 1) / 2;
  if (s.graph == "random") {
    s.p_edge = get_optional<double>(cfg, "p_edge").value_or(default_edge_probability(s.p));
    if (!(s.p_edge >= 0.0 && s.p_edge <= 1.0)) throw ValidationError("p_edge must lie in [0, 1]");
  } else if (s.graph == "common_private") {
    s.n_common = get_field<int>(cfg, "n_common");
    s.n_private = get_field<int>(cfg, "n_private");
    if (s.n_common < 0 || s.n_private < 0) throw ValidationError("edge counts must be non-negative");
    if (s.n_common + s.n_private > pairs) throw ValidationError("n_common + n_private exceeds p(p-1)/2");
  } else {
    throw ValidationError("graph must be 'random' or 'common_private'");
  }

  if (auto range = get_optional<std::vector<double>>(cfg, "weight_range")) {
    if (range->size() != 2) throw ValidationError("weight_range must be [low, high]");
    s.low = (*range)[0];
    s.high = (*range)[1];
  }
  if (!(s.low > 0.0 && s.low < s.high)) throw ValidationError("weight_range must satisfy 0 < low < high");

  s.target_u = get_optional<double>(cfg, "target_u");
  if (s.target_u && !(*s.target_u >= -1.0 && *s.target_u <= 1.0)) throw ValidationError("target_u must lie in [-1, 1]");
  if (s.target_u && s.graph != "random") throw ValidationError("target_u requires graph = 'random'");
  s.motifs = get_optional<int>(cfg, "unfaithful_motifs").value_or(0);
  if (s.motifs < 0) throw ValidationError("unfaithful_motifs must be non-negative");
  const auto seed = get_optional<long long>(cfg, "seed").value_or(1);
  if (seed < 0) throw ValidationError("seed must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);
  return s;
}

fs::path preset_path(const std::string& name) {
  fs::path dir = JOD_PRESET_DIR;
  if (const char* env = std::getenv("JOD_PRESET_DIR"); env && *env) dir = env;
  fs::path file = dir / (name + ".json");
  if (!fs::exists(file)) throw ValidationError("unknown preset '" + name + "' (looked in " + dir.string() + ")");
  return file;
}

Rng dataset_rng(std::uint64_t seed, int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k + 1)};
  return Rng(seq);
}

int cmd_simulate(const json& cfg, const fs::path& outdir, std::ostream& out) {
  const SimSettings s = parse_sim_settings(cfg);
  Rng rng(s.seed);
  const Ordering sigma_star = Ordering::identity(s.p);

  std::vector<Ordering> orderings(static_cast<std::size_t>(s.K), sigma_star);
  double realized_u = 1.0;
  if (s.target_u) {
    auto similar = similar_orderings(s.p, s.K, *s.target_u, rng);
    orderings = similar.orderings;
    realized_u = similar.pairwise_u;
  }

  std::vector<Dag> graphs;
  if (s.graph == "common_private") {
    graphs = common_private_collection(s.p, s.K, s.n_common, s.n_private, sigma_star, rng);
  } else {
    for (int k = 0; k < s.K; ++k) graphs.push_back(random_ordered_dag(s.p, s.p_edge, orderings[static_cast<std::size_t>(k)], rng));
  }

  std::vector<WeightedDag> scms;
  for (const Dag& g : graphs) {
    scms.push_back(s.motifs > 0 ? unfaithful_scm(g, s.motifs, rng, s.low, s.high) : sample_weights(g, s.low, s.high, rng));
  }

  std::vector<std::string> data_text;
  for (int k = 0; k < s.K; ++k) {
    Rng drng = dataset_rng(s.seed, k);
    const Dataset ds = simulate(scms[static_cast<std::size_t>(k)], s.n[static_cast<std::size_t>(k)], drng);
    std::ostringstream buf;
    write_dataset_csv(buf, ds);
    data_text.push_back(buf.str());
  }

  // Everything validated and generated; now touch the file system.
  make_dir(outdir);
  json datasets = json::array();
  for (int k = 0; k < s.K; ++k) {
    const std::string data_name = "data_" + std::to_string(k + 1) + ".csv";
    const std::string truth_name = "truth_" + std::to_string(k + 1) + ".csv";
    io::write_file(outdir / data_name, data_text[static_cast<std::size_t>(k)]);
    io::write_file(outdir / truth_name, dag_text(graphs[static_cast<std::size_t>(k)]));
    datasets.push_back({{"data", data_name}, {"truth", truth_name}, {"n", s.n[static_cast<std::size_t>(k)]}});
  }
  json manifest{{"p", s.p},
                {"K", s.K},
                {"seed", s.seed},
                {"sigma_star", ordering_json(sigma_star)},
                {"settings", s.to_json()},
                {"datasets", datasets}};
  if (s.target_u) {
    json ords = json::array();
    for (const auto& o : orderings) ords.push_back(ordering_json(o));
    manifest["orderings"] = ords;
    manifest["realized_u"] = realized_u;
  }
  save_json(outdir / "manifest.json", manifest);
  out << "wrote " << s.K << " datasets to " << outdir.string() << "\n";
  return kOk;
}

// --------------------------------------------------------------------- fit

struct DataBundle {
  int p = 0;
  std::vector<Dataset> datasets;
  std::vector<std::optional<fs::path>> truth;
  std::optional<Ordering> sigma_star;
};

DataBundle load_bundle(const fs::path& manifest_path) {
  const json m = load_json(manifest_path);
  const fs::path base = manifest_path.parent_path();
  DataBundle b;
  if (!m.contains("datasets") || !m.at("datasets").is_array() || m.at("datasets").empty())
    throw ValidationError("manifest has no datasets");
  for (const auto& d : m.at("datasets")) {
    const fs::path data = base / get_field<std::string>(d, "data");
    b.datasets.push_back(load_dataset(data));
    if (auto t = get_optional<std::string>(d, "truth")) {
      b.truth.emplace_back(base / *t);
    } else {
      b.truth.emplace_back(std::nullopt);
    }
  }
  b.p = b.datasets.front().p();
  for (const auto& ds : b.datasets) {
    if (ds.p() != b.p) throw ValidationError("datasets disagree on the number of columns");
  }
  if (m.contains("p") && get_field<int>(m, "p") != b.p) throw ValidationError("manifest p differs from the data");
  if (m.contains("sigma_star") && !m.contains("orderings")) b.sigma_star = ordering_from_json(m.at("sigma_star"), b.p);
  return b;
}

struct FitOptions {
  fs::path manifest;
  fs::path outdir;
  ScoreParams params;
  long iters = 0;
  long burn_in = -1;
  int chains = 1;
  long long seed = 1;
  std::string neighborhood = "r2r";
  int threads = 0;
  int thin = 1;
  bool equalize = false;
};

std::string csv_quote(const std::string& s) { return "\"" + s + "\""; }

std::string edges_field(const Dag& g) {
  std::string s;
  for (const Edge& e : g.edges()) {
    if (!s.empty()) s += ' ';
    s += std::to_string(e.tail + 1) + ">" + std::to_string(e.head + 1);
  }
  return s;
}

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err) {
  o.params.validate();
  const DataBundle bundle = load_bundle(o.manifest);
  const int p = bundle.p;
  const Neighborhood kind = parse_neighborhood(o.neighborhood);
  long iters = o.iters > 0 ? o.iters : 20L * p * p;
  if (o.equalize) iters = equalized_iterations(iters, p, Neighborhood::r2r, kind);
  if (o.chains < 1) throw ValidationError("--chains must be at least 1");
  if (o.seed < 0) throw ValidationError("--seed must be non-negative");

  std::vector<ChainConfig> configs;
  for (int c = 0; c < o.chains; ++c) {
    ChainConfig cfg;
    cfg.iterations = iters;
    if (o.burn_in >= 0) cfg.burn_in = o.burn_in;
    cfg.neighborhood = kind;
    cfg.seed = static_cast<std::uint64_t>(o.seed) + static_cast<std::uint64_t>(c);
    cfg.thin = o.thin;
    cfg.validate(p);
    configs.push_back(cfg);
  }

  std::vector<DatasetScorer> scorers;
  scorers.reserve(bundle.datasets.size());
  for (const auto& ds : bundle.datasets) scorers.emplace_back(ds, o.params);
  const OrderPosterior model(scorers);
  const std::size_t hits_before = indegree_cap_hits();
  const auto traces = run_ensemble(configs, model, resolve_threads(o.threads));

  for (std::size_t c = 0; c < traces.size(); ++c) {
    if (!traces[c].error.empty()) throw NumericalError("chain " + std::to_string(c + 1) + " failed: " + traces[c].error);
  }

  make_dir(o.outdir);
  const int K = static_cast<int>(scorers.size());
  json chain_files = json::array();
  for (std::size_t c = 0; c < traces.size(); ++c) {
    const auto& t = traces[c];
    const std::string id = std::to_string(c + 1);
    std::string trace = "iter,log_post,accepted,ordering\n";
    std::string graphs = "iter,k,edges\n";
    for (const auto& s : t.samples) {
      trace += std::to_string(s.iteration) + "," + io::format_double(s.log_post) + "," + (s.accepted ? "1" : "0") + "," +
               csv_quote(format_ordering(s.ordering)) + "\n";
      for (int k = 0; k < K; ++k) {
        graphs += std::to_string(s.iteration) + "," + std::to_string(k + 1) + "," +
                  edges_field(s.graphs[static_cast<std::size_t>(k)]) + "\n";
      }
    }
    std::string traj = "iter,log_post\n";
    for (std::size_t i = 0; i < t.trajectory.size(); ++i) traj += std::to_string(i) + "," + io::format_double(t.trajectory[i]) + "\n";
    io::write_file(o.outdir / ("chain_" + id + ".csv"), trace);
    io::write_file(o.outdir / ("graphs_" + id + ".csv"), graphs);
    io::write_file(o.outdir / ("trajectory_" + id + ".csv"), traj);
    json maps = json::array();
    if (!t.samples.empty()) {
      for (int k = 0; k < K; ++k) {
        const std::string name = "map_" + id + "_" + std::to_string(k + 1) + ".csv";
        io::write_file(o.outdir / name, dag_text(t.samples.back().graphs[static_cast<std::size_t>(k)]));
        maps.push_back(name);
      }
    }
    chain_files.push_back({{"trace", "chain_" + id + ".csv"},
                           {"graphs", "graphs_" + id + ".csv"},
                           {"trajectory", "trajectory_" + id + ".csv"},
                           {"map", maps},
                           {"seed", configs[c].seed},
                           {"acceptance_rate", t.acceptance_rate()}});
  }

  std::error_code ec;
  fs::path rel = fs::relative(fs::absolute(o.manifest), fs::absolute(o.outdir), ec);
  if (ec) rel = fs::absolute(o.manifest);
  json manifest{{"p", p},
                {"K", K},
                {"data_manifest", rel.generic_string()},
                {"iterations", iters},
                {"burn_in", configs.front().effective_burn_in()},
                {"thin", o.thin},
                {"neighborhood", std::string(to_string(kind))},
                {"seed", o.seed},
                {"params",
                 {{"alpha", o.params.alpha},
                  {"gamma", o.params.gamma},
                  {"kappa", o.params.kappa},
                  {"c0", o.params.c0},
                  {"d", o.params.indegree_cap(p)}}},
                {"chains", chain_files}};
  save_json(o.outdir / "fit.json", manifest);

  if (indegree_cap_hits() > hits_before) {
    err << "warning: the in-degree cap d=" << o.params.indegree_cap(p) << " was reached "
        << (indegree_cap_hits() - hits_before) << " times during parent selection\n";
  }
  out << "ran " << traces.size() << " chain(s) of " << iters << " iterations; output in " << o.outdir.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- diagnose

std::vector<std::string> csv_fields_quoted(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::vector<std::string> data_lines(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  std::vector<std::string> lines;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

Dag parse_edges_field(int p, const std::string& field) {
  Dag g(p);
  std::istringstream in(field);
  std::string tok;
  while (in >> tok) {
    const auto gt = tok.find('>');
    if (gt == std::string::npos) throw IoError("malformed edge '" + tok + "'");
    const auto i = io::parse_integer(std::string_view(tok).substr(0, gt));
    const auto j = io::parse_integer(std::string_view(tok).substr(gt + 1));
    if (i < 1 || i > p || j < 1 || j > p) throw IoError("edge endpoint out of range in '" + tok + "'");
    g.add_edge(static_cast<Node>(i - 1), static_cast<Node>(j - 1));
  }
  return g;
}

ChainTrace load_trace(const fs::path& dir, const json& files, int p, int K) {
  ChainTrace t;
  for (const auto& line : data_lines(dir / get_field<std::string>(files, "trace"))) {
    const auto f = csv_fields_quoted(line);
    if (f.size() != 4) throw IoError("malformed trace row '" + line + "'");
    TraceSample s;
    s.iteration = static_cast<long>(io::parse_integer(f[0]));
    s.log_post = io::parse_double(f[1]);
    s.accepted = f[2] == "1";
    s.ordering = parse_ordering(f[3]);
    if (s.ordering.size() != p) throw IoError("ordering length differs from p in trace");
    s.graphs.assign(static_cast<std::size_t>(K), Dag(p));
    t.samples.push_back(std::move(s));
  }
  std::size_t idx = 0;
  for (const auto& line : data_lines(dir / get_field<std::string>(files, "graphs"))) {
    const auto f = csv_fields_quoted(line);
    if (f.size() != 3) throw IoError("malformed graph row '" + line + "'");
    const long iter = static_cast<long>(io::parse_integer(f[0]));
    const auto k = io::parse_integer(f[1]);
    while (idx < t.samples.size() && t.samples[idx].iteration < iter) ++idx;
    if (idx >= t.samples.size() || t.samples[idx].iteration != iter || k < 1 || k > K)
      throw IoError("graph row does not match the trace: '" + line + "'");
    t.samples[idx].graphs[static_cast<std::size_t>(k - 1)] = parse_edges_field(p, f[2]);
  }
  return t;
}

struct DiagnoseOptions {
  fs::path fit;
  std::optional<fs::path> data_manifest;
  std::optional<fs::path> out_file;
  std::optional<fs::path> matrices;
  bool gr = false;
  double threshold = 0.5;
};

json number_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_diagnose(const DiagnoseOptions& o, std::ostream& out) {
  const json fit = load_json(o.fit);
  const fs::path dir = o.fit.parent_path();
  const int p = get_field<int>(fit, "p");
  const int K = get_field<int>(fit, "K");
  std::vector<ChainTrace> traces;
  for (const auto& c : fit.at("chains")) traces.push_back(load_trace(dir, c, p, K));
  if (o.gr && traces.size() < 2) throw ValidationError("≥2 chains required");

  std::vector<EdgeMatrix> inclusion;
  for (int k = 0; k < K; ++k) inclusion.push_back(edge_inclusion(traces, k));

  // Ground truth, when the data manifest provides it.
  std::vector<Dag> truth;
  std::optional<Ordering> sigma_star;
  fs::path manifest_path;
  if (o.data_manifest) {
    manifest_path = *o.data_manifest;
  } else if (auto rel = get_optional<std::string>(fit, "data_manifest")) {
    manifest_path = fs::path(*rel).is_absolute() ? fs::path(*rel) : dir / *rel;
  }
  if (!manifest_path.empty()) {
    const json m = load_json(manifest_path);
    bool complete = m.contains("datasets") && m.at("datasets").size() == static_cast<std::size_t>(K);
    if (complete) {
      for (const auto& d : m.at("datasets")) {
        auto t = get_optional<std::string>(d, "truth");
        if (!t) {
          complete = false;
          break;
        }
        truth.push_back(load_edge_list(manifest_path.parent_path() / *t));
        if (truth.back().size() != p) throw ValidationError("truth graph size differs from p");
      }
    }
    if (!complete) truth.clear();
    if (m.contains("sigma_star") && !m.contains("orderings")) sigma_star = ordering_from_json(m.at("sigma_star"), p);
  }

  std::optional<double> delta_v, tpr_v, fdr_v, tau_v;
  if (!truth.empty()) {
    delta_v = delta(truth, inclusion);
    double tpr = 0.0, fdr = 0.0;
    for (int k = 0; k < K; ++k) {
      const Rates r = tpr_fdr(truth[static_cast<std::size_t>(k)], threshold_graph(inclusion[static_cast<std::size_t>(k)], o.threshold));
      tpr += r.tpr;
      fdr += r.fdr;
    }
    tpr_v = tpr / K;
    fdr_v = fdr / K;
  }
  if (sigma_star) tau_v = tau_star(traces, *sigma_star);

  json summary{{"delta", number_or_null(delta_v)},
               {"tau_star", number_or_null(tau_v)},
               {"tpr", number_or_null(tpr_v)},
               {"fdr", number_or_null(fdr_v)},
               {"chains", traces.size()},
               {"samples_per_chain", traces.front().samples.size()},
               {"gr", nullptr}};
  if (o.gr) {
    const auto gr = gelman_rubin(traces);
    summary["gr"] = {{"max", gr.max()}, {"frac_lt_1p1", gr.fraction_below(1.1)}, {"frac_lt_1p001", gr.fraction_below(1.001)}};
  }

  if (o.matrices) {
    make_dir(*o.matrices);
    for (int k = 0; k < K; ++k) {
      std::ostringstream buf;
      write_matrix_csv(buf, inclusion[static_cast<std::size_t>(k)]);
      io::write_file(*o.matrices / ("inclusion_" + std::to_string(k + 1) + ".csv"), buf.str());
    }
  }
  const std::string text = summary.dump(2) + "\n";
  if (o.out_file) {
    io::write_file(*o.out_file, text);
  } else {
    out << text;
  }
  return kOk;
}

// ------------------------------------------------------------------ oracle

int cmd_oracle(const fs::path& path, int threads, std::ostream& out) {
  const json c = load_json(path);
  const int p = get_field<int>(c, "p");
  if (p < 2) throw ValidationError("p must be at least 2");
  if (p > kEnumerationLimit) throw LimitExceeded("oracle enumerates p! orderings; p must be <= " + std::to_string(kEnumerationLimit));
  Rng rng(static_cast<std::uint64_t>(get_optional<long long>(c, "seed").value_or(1)));
  if (!c.contains("graphs") || !c.at("graphs").is_array() || c.at("graphs").empty())
    throw ValidationError("collection needs a non-empty 'graphs' array");

  std::vector<WeightedDag> scms;
  for (const auto& g : c.at("graphs")) {
    std::vector<Edge> edges;
    for (const auto& e : get_field<std::vector<std::vector<int>>>(g, "edges")) {
      if (e.size() != 2 || e[0] < 1 || e[0] > p || e[1] < 1 || e[1] > p) throw ValidationError("edges are 1-indexed [i, j] pairs");
      edges.push_back({e[0] - 1, e[1] - 1});
    }
    const Dag dag = Dag::from_edges(p, edges);
    WeightedDag scm;
    if (g.contains("weights")) {
      scm = make_weighted(dag);
      for (const auto& w : get_field<std::vector<std::vector<double>>>(g, "weights")) {
        if (w.size() != 3) throw ValidationError("weights are [i, j, w] triples");
        const int i = static_cast<int>(w[0]) - 1;
        const int j = static_cast<int>(w[1]) - 1;
        if (i < 0 || i >= p || j < 0 || j >= p) throw ValidationError("weight endpoint out of range");
        scm.set_weight(i, j, w[2]);
      }
      if (auto noise = get_optional<std::vector<double>>(g, "noise")) scm.noise_vars = *noise;
    } else {
      scm = sample_weights(dag, 0.5, 1.0, rng);
    }
    scm.validate();
    scms.push_back(std::move(scm));
  }

  const JointArgmax res = joint_argmax(scms, kDefaultCoefficientTol, resolve_threads(threads));
  auto covers = [&](const Ordering& s) {
    for (const Edge& e : e_max(s)) {
      if (!std::binary_search(res.essential_union.begin(), res.essential_union.end(), e)) return false;
    }
    return true;
  };
  bool emax_ok = false;
  if (c.contains("sigma_star")) {
    emax_ok = covers(ordering_from_json(c.at("sigma_star"), p));
  } else {
    emax_ok = std::any_of(res.class_intersection.begin(), res.class_intersection.end(), covers);
  }

  json argmax = json::array();
  for (const auto& s : res.argmax) argmax.push_back(ordering_json(s));
  json common = json::array();
  for (const auto& s : res.class_intersection) common.push_back(ordering_json(s));
  const json result{{"argmax", argmax},
                    {"best_score", res.best_score},
                    {"essential_union", edges_json(res.essential_union)},
                    {"class_intersection", common},
                    {"emax_satisfied", emax_ok}};
  out << result.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint ordering-based DAG learning across heterogeneous datasets"};
  app.name("jod");
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate synthetic datasets from a config or preset");
  std::string sim_config, sim_preset, sim_out;
  long long sim_seed = 0;
  int sim_p = 0, sim_K = 0, sim_n = 0;
  auto* sim_config_opt = sim->add_option("config", sim_config, "JSON config file");
  auto* sim_preset_opt = sim->add_option("--preset", sim_preset, "named preset (e.g. table1, table4)");
  sim_config_opt->excludes(sim_preset_opt);
  auto* sim_out_opt = sim->add_option("-o,--out", sim_out, "output directory (overrides config outdir)");
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "override the seed");
  auto* sim_p_opt = sim->add_option("--p", sim_p, "override p");
  auto* sim_K_opt = sim->add_option("--K", sim_K, "override K");
  auto* sim_n_opt = sim->add_option("--n", sim_n, "override the per-dataset sample size");

  // fit
  auto* fit = app.add_subcommand("fit", "Run MH chains over orderings");
  FitOptions fo;
  std::string fit_manifest, fit_out;
  fit->add_option("manifest", fit_manifest, "data manifest written by simulate")->required();
  fit->add_option("-o,--out", fit_out, "output directory")->required();
  fit->add_option("--alpha", fo.params.alpha, "likelihood fraction alpha")->capture_default_str();
  fit->add_option("--gamma", fo.params.gamma, "prior precision gamma")->capture_default_str();
  fit->add_option("--kappa", fo.params.kappa, "inverse-gamma shape kappa")->capture_default_str();
  fit->add_option("--c0", fo.params.c0, "edge penalty c0")->capture_default_str();
  fit->add_option("--d", fo.params.max_indegree, "in-degree cap (0 = p)")->capture_default_str();
  fit->add_option("--iters", fo.iters, "iterations per chain (default 20 p^2)");
  fit->add_option("--burn-in", fo.burn_in, "burn-in (default iters/2)");
  fit->add_option("--thin", fo.thin, "record every thin-th post burn-in state")->capture_default_str();
  fit->add_option("--chains", fo.chains, "number of chains")->capture_default_str();
  fit->add_option("--seed", fo.seed, "seed of chain 1; chain c uses seed + c - 1")->capture_default_str();
  fit->add_option("--neighborhood", fo.neighborhood, "r2r | adj | rts")->capture_default_str();
  fit->add_option("--threads", fo.threads, "worker threads (default: all cores; JOD_THREADS overrides)");
  fit->add_flag("--equalize", fo.equalize, "rescale --iters to the R2R-equivalent budget of the chosen neighborhood");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "Summarize a fit against the truth");
  DiagnoseOptions dopt;
  std::string diag_fit, diag_manifest, diag_out, diag_matrices;
  diag->add_option("fit", diag_fit, "fit.json written by fit")->required();
  auto* diag_manifest_opt = diag->add_option("--data", diag_manifest, "data manifest (default: the one recorded in fit.json)");
  auto* diag_out_opt = diag->add_option("-o,--out", diag_out, "write the JSON summary here instead of stdout");
  auto* diag_mat_opt = diag->add_option("--matrices", diag_matrices, "directory for per-dataset inclusion-probability CSVs");
  diag->add_flag("--gr", dopt.gr, "include Gelman-Rubin statistics (needs >= 2 chains)");
  diag->add_option("--threshold", dopt.threshold, "inclusion threshold for TPR/FDR")->capture_default_str();

  // oracle
  auto* orc = app.add_subcommand("oracle", "Population-level joint argmax over all orderings of a graph collection");
  std::string orc_file;
  int orc_threads = 0;
  orc->add_option("collection", orc_file, "graph-collection JSON")->required();
  orc->add_option("--threads", orc_threads, "worker threads");

  // budget
  auto* bud = app.add_subcommand("budget", "Iteration count matching an R2R budget under another neighborhood");
  long bud_iters = 0;
  int bud_p = 0;
  std::string bud_from = "r2r", bud_to = "adj";
  bud->add_option("--iters", bud_iters, "iterations under --from")->required();
  bud->add_option("--p", bud_p, "number of nodes")->required();
  bud->add_option("--from", bud_from, "r2r | adj | rts")->capture_default_str();
  bud->add_option("--to", bud_to, "r2r | adj | rts")->capture_default_str();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kValidation;
    }

    if (sim->parsed()) {
      json cfg;
      fs::path outdir;
      if (!sim_config.empty()) {
        cfg = load_json(sim_config);
      } else if (!sim_preset.empty()) {
        cfg = load_json(preset_path(sim_preset));
      } else {
        throw ValidationError("simulate needs a config file or --preset");
      }
      if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
      if (sim_seed_opt->count()) cfg["seed"] = sim_seed;
      if (sim_p_opt->count()) cfg["p"] = sim_p;
      if (sim_K_opt->count()) {
        cfg["K"] = sim_K;
        cfg.erase("n_list");
      }
      if (sim_n_opt->count()) {
        cfg["n"] = sim_n;
        cfg.erase("n_list");
        cfg.erase("n_total");
      }
      if (sim_out_opt->count()) {
        outdir = sim_out;
      } else if (cfg.contains("outdir")) {
        outdir = get_field<std::string>(cfg, "outdir");
      } else {
        throw ValidationError("no output directory: pass --out or set 'outdir'");
      }
      return cmd_simulate(cfg, outdir, out);
    }
    if (fit->parsed()) {
      fo.manifest = fit_manifest;
      fo.outdir = fit_out;
      return cmd_fit(fo, out, err);
    }
    if (diag->parsed()) {
      dopt.fit = diag_fit;
      if (diag_manifest_opt->count()) dopt.data_manifest = diag_manifest;
      if (diag_out_opt->count()) dopt.out_file = diag_out;
      if (diag_mat_opt->count()) dopt.matrices = diag_matrices;
      return cmd_diagnose(dopt, out);
    }
    if (orc->parsed()) return cmd_oracle(orc_file, orc_threads, out);
    if (bud->parsed()) {
      if (bud_p < 2) throw ValidationError("--p must be at least 2");
      if (bud_iters < 1) throw ValidationError("--iters must be positive");
      out << equalized_iterations(bud_iters, bud_p, parse_neighborhood(bud_from), parse_neighborhood(bud_to)) << "\n";
      return kOk;
    }
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace jod::cli
