#include "lassoggm/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <filesystem>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lassoggm/dp_mixture.hpp"
#include "lassoggm/graph.hpp"
#include "lassoggm/io.hpp"
#include "lassoggm/metrics.hpp"
#include "lassoggm/mixture.hpp"
#include "lassoggm/sampler.hpp"
#include "lassoggm/simgen.hpp"

namespace lassoggm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Where abort diagnostics go; set once the output directory is known.
fs::path g_abort_dir = "out";

const std::set<std::string> kMcmcKeys = {"seed",        "iterations", "burn_in", "thin",
                                         "grid_points", "proposal_steps", "threads", "out_dir"};

// JSON config with a closed key set.
class Config {
 public:
  Config(json j, const std::string& where, std::set<std::string> allowed)
      : j_(std::move(j)), where_(where) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.contains(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const std::string& key) const { return j_.at(key); }
  const json& all() const { return j_; }

  template <class T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? as<T>(key) : fallback;
  }

  template <class T>
  T require(const std::string& key) const {
    if (!has(key)) throw ConfigError(where_ + ": missing required key '" + key + "'");
    return as<T>(key);
  }

  void set(const std::string& key, json v) { j_[key] = std::move(v); }

 private:
  template <class T>
  T as(const std::string& key) const {
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + ": key '" + key + "' has the wrong type");
    }
  }

  json j_;
  std::string where_;
};

json load_config(const Overrides& flags) {
  if (!flags.config) return json::object();
  try {
    return read_json(*flags.config);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::set<std::string> with(std::set<std::string> base, std::initializer_list<std::string> extra) {
  base.insert(extra.begin(), extra.end());
  return base;
}

// Copies flag values into the config so the manifest records what was run.
void apply_flags(Config& cfg, const Overrides& f) {
  if (f.seed) cfg.set("seed", *f.seed);
  if (f.iterations) cfg.set("iterations", *f.iterations);
  if (f.burn_in) cfg.set("burn_in", *f.burn_in);
  if (f.thin) cfg.set("thin", *f.thin);
  if (f.threads) cfg.set("threads", *f.threads);
  if (f.out_dir) cfg.set("out_dir", *f.out_dir);
  if (f.top_k) cfg.set("top_k", *f.top_k);
  if (f.threshold) cfg.set("threshold", *f.threshold);
}

McmcConfig mcmc_from(const Config& cfg) {
  McmcConfig m;
  m.seed = cfg.get<std::uint64_t>("seed", m.seed);
  m.iterations = cfg.get<int>("iterations", m.iterations);
  m.burn_in = cfg.get<int>("burn_in", m.burn_in);
  m.thin = cfg.get<int>("thin", m.thin);
  m.grid_points = cfg.get<int>("grid_points", m.grid_points);
  if (cfg.has("proposal_steps")) {
    const Config s(cfg.raw("proposal_steps"), "proposal_steps", {"tau", "q", "s"});
    m.steps.tau = s.get<double>("tau", m.steps.tau);
    m.steps.q = s.get<double>("q", m.steps.q);
    m.steps.s = s.get<double>("s", m.steps.s);
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return m;
}

Hyperparameters hyper_from(const Config& cfg) {
  Hyperparameters hp;
  if (!cfg.has("hyperparameters")) return hp;
  const Config h(cfg.raw("hyperparameters"), "hyperparameters",
                 {"e", "f", "a", "b", "g", "h", "k", "l", "alpha", "nu0", "b0", "dp_alpha", "nu_e",
                  "nu_f", "nu_c", "nu_d", "nu_alpha", "nu_beta"});
  for (auto [key, ptr] : std::initializer_list<std::pair<const char*, double*>>{
           {"e", &hp.e},
           {"f", &hp.f},
           {"a", &hp.a},
           {"b", &hp.b},
           {"g", &hp.g},
           {"h", &hp.h},
           {"k", &hp.k},
           {"l", &hp.l},
           {"dp_alpha", &hp.dp_alpha},
           {"nu_e", &hp.nu_e},
           {"nu_f", &hp.nu_f},
           {"nu_c", &hp.nu_c},
           {"nu_d", &hp.nu_d},
           {"nu_alpha", &hp.nu_alpha},
           {"nu_beta", &hp.nu_beta}}) {
    *ptr = h.get<double>(key, *ptr);
  }
  if (h.has("nu0")) hp.nu0 = h.get<double>("nu0", 0.0);
  if (h.has("alpha")) {
    const json& a = h.raw("alpha");
    if (a.is_number()) {
      hp.alpha = Vector::Constant(1, a.get<double>());
    } else {
      const auto v = h.get<std::vector<double>>("alpha", {});
      hp.alpha = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    }
  }
  if (h.has("b0")) {
    const auto rows = h.get<std::vector<std::vector<double>>>("b0", {});
    SymMatrix b0(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw ConfigError("hyperparameters: b0 must be square");
      for (std::size_t j = 0; j < rows.size(); ++j) {
        b0(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
      }
    }
    hp.b0 = b0;
  }
  return hp;
}

void validate_hyper(const Hyperparameters& hp, Index p) {
  try {
    hp.validate(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// Collects written files for the manifest.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { g_abort_dir = dir_; }

  fs::path path(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }
  const fs::path& dir() const { return dir_; }

  void manifest(const std::string& command, const Config& cfg, const std::vector<std::string>& inputs) {
    std::vector<std::string> files = files_;
    files.push_back("manifest.json");
    std::sort(files.begin(), files.end());
    json m = {{"command", command},
              {"version", kVersion},
              {"config", cfg.all()},
              {"inputs", inputs},
              {"outputs", files}};
    write_json(dir_ / "manifest.json", m);
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

json acceptance_json(const AcceptanceStats& a) {
  return {{"edge", a.edge.rate()}, {"tau", a.tau.rate()}, {"q", a.q.rate()}, {"s", a.s.rate()}};
}

json edges_json(const Adjacency& a) {
  json out = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = i + 1; j < a.cols(); ++j) {
      if (a(i, j) != 0) out.push_back({i, j});
    }
  }
  return out;
}

json partition_json(const Partition& z) { return json(z); }

json number_or_undefined(double x) {
  if (std::isnan(x)) return "undefined";
  return x;
}

LabeledData load_data(const Config& cfg, const std::string& key) {
  const std::string path = cfg.require<std::string>(key);
  LabeledData d = read_data_csv(path);
  if (d.data.p() < 2) throw ConfigError(path + ": need at least two variables");
  if (d.data.n() < 1) throw ConfigError(path + ": no samples");
  if (!d.data.y.allFinite()) throw ConfigError(path + ": non-finite values");
  return d;
}

std::vector<int> k_range_from(const Config& cfg) {
  const auto ks = cfg.get<std::vector<int>>("k_range", {1, 2, 3});
  if (ks.empty()) throw ConfigError("k_range must not be empty");
  for (int k : ks) {
    if (k < 1) throw ConfigError("k_range entries must be positive");
  }
  return ks;
}

// -------------------------------------------------------------------------

}  // namespace

void configure_logging() {
  auto logger = spdlog::get("lassoggm");
  if (!logger) logger = spdlog::stderr_color_mt("lassoggm");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("GGM_LOG_LEVEL");
  const std::string level = env ? env : "warn";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "warn") spdlog::set_level(spdlog::level::warn);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else throw ConfigError("GGM_LOG_LEVEL must be one of error, warn, info, debug; got '" + level + "'");
}

void cmd_simulate(const Overrides& flags) {
  Config cfg(load_config(flags), "simulate config",
             {"structure", "p", "n", "pi", "seed", "mean", "components", "out_dir", "threads"});
  apply_flags(cfg, flags);
  const auto seed = cfg.get<std::uint64_t>("seed", 1);
  const auto p = cfg.get<Index>("p", 10);
  Outputs out(cfg.get<std::string>("out_dir", "out"));
  const auto labels = default_labels(p);
  Rng root(seed);

  struct Component {
    StructureSpec spec;
    Index n;
    Vector mean;
  };
  auto component_from = [&](const Config& c, std::size_t idx) {
    Component comp;
    try {
      comp.spec.kind = parse_structure(c.get<std::string>("structure", "banded"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    comp.spec.p = p;
    comp.spec.pi = c.get<double>("pi", 0.1);
    comp.spec.seed = seed;
    comp.n = c.get<Index>("n", 25);
    if (comp.n < 1) throw ConfigError("n must be positive");
    const auto mean = c.get<std::vector<double>>("mean", std::vector<double>(static_cast<std::size_t>(p), 0.0));
    if (static_cast<Index>(mean.size()) != p) {
      throw ConfigError("component " + std::to_string(idx) + ": mean must have p entries");
    }
    comp.mean = Eigen::Map<const Vector>(mean.data(), p);
    try {
      comp.spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    return comp;
  };

  std::vector<Component> comps;
  if (cfg.has("components")) {
    const json& list = cfg.raw("components");
    if (!list.is_array() || list.empty()) throw ConfigError("components must be a nonempty array");
    for (std::size_t c = 0; c < list.size(); ++c) {
      comps.push_back(component_from(
          Config(list[c], "components[" + std::to_string(c) + "]", {"structure", "n", "mean", "pi"}), c));
    }
  } else {
    comps.push_back(component_from(cfg, 0));
  }

  Matrix all(p, 0);
  std::vector<int> membership;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    Rng gen = root.substream(1 + c);
    Rng draw = root.substream(1001 + c);
    const SymMatrix omega = generate(comps[c].spec, gen);
    const DataMatrix y = simulate_data(omega, comps[c].n, comps[c].mean, draw);
    const std::string name = comps.size() == 1 ? "truth.csv" : "truth_" + std::to_string(c) + ".csv";
    write_matrix_csv(out.path(name), omega, labels);
    Matrix next(p, all.cols() + y.n());
    next << all, y.y;
    all = std::move(next);
    membership.insert(membership.end(), static_cast<std::size_t>(y.n()), static_cast<int>(c));
  }
  write_data_csv(out.path("data.csv"), DataMatrix{all}, labels);
  if (comps.size() > 1) {
    std::ostringstream os;
    os << "component\n";
    for (int m : membership) os << m << '\n';
    write_text(out.path("labels.csv"), os.str());
  }
  out.manifest("simulate", cfg, {});
  spdlog::info("simulate: wrote {} samples to {}", all.cols(), out.dir().string());
}

void cmd_fit(const Overrides& flags) {
  Config cfg(load_config(flags), "fit config",
             with(kMcmcKeys, {"data", "top_k", "threshold", "hyperparameters", "write_samples"}));
  apply_flags(cfg, flags);
  const McmcConfig mcmc = mcmc_from(cfg);
  const int top = cfg.get<int>("top_k", 3);
  if (top < 1) throw ConfigError("top_k must be positive");
  const bool use_threshold = cfg.has("threshold");
  const double threshold = cfg.get<double>("threshold", 0.0);
  if (!(threshold >= 0.0)) throw ConfigError("threshold must be nonnegative");
  Hyperparameters hp = hyper_from(cfg);
  const LabeledData in = load_data(cfg, "data");
  const Index p = in.data.p();
  validate_hyper(hp, p);
  Outputs out(cfg.get<std::string>("out_dir", "out"));

  const Vector center = in.data.mean();
  const ChainOutput chain = run_chain(in.data.centered(), hp, mcmc);
  const GraphPosterior post = tally(chain);
  const auto ranked = top_k(post, static_cast<std::size_t>(top));
  const PosteriorSummary sum = summarize(chain);
  const Adjacency median = median_probability_graph(post.edge_marginals);

  json top_json = json::array();
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto& [key, prob] = ranked[r];
    const Adjacency a = adjacency_from_key(key, p);
    const std::string dot = "graph_" + std::to_string(r + 1) + ".dot";
    write_text(out.path(dot), export_graph(a, graph_mean_correlation(chain, key), in.labels,
                                           "rank" + std::to_string(r + 1)));
    top_json.push_back({{"rank", r + 1},
                        {"key", key},
                        {"probability", prob},
                        {"edges", edges_json(a)},
                        {"dot", dot}});
  }
  write_text(out.path("median_graph.dot"),
             export_graph(median, sum.mean_correlation, in.labels, "median"));
  write_matrix_csv(out.path("posterior_mean_precision.csv"), sum.mean_precision, in.labels);
  write_matrix_csv(out.path("median_graph.csv"), median.cast<double>(), in.labels);

  json summary = {{"command", "fit"},
                  {"p", p},
                  {"n", in.data.n()},
                  {"labels", in.labels},
                  {"seed", mcmc.seed},
                  {"iterations", mcmc.iterations},
                  {"burn_in", mcmc.burn_in},
                  {"thin", mcmc.thin},
                  {"retained", chain.states.size()},
                  {"data_mean", to_json(center)},
                  {"distinct_graphs", post.visit_counts.size()},
                  {"edge_marginals", to_json(post.edge_marginals)},
                  {"median_graph", graph_key(median)},
                  {"top_graphs", top_json},
                  {"posterior_mean_precision", to_json(sum.mean_precision)},
                  {"posterior_mean_partial_correlation", to_json(partial_correlation(sum.mean_precision))},
                  {"mean_sigma2", sum.mean_sigma2},
                  {"acceptance", acceptance_json(chain.acceptance)},
                  {"threshold", nullptr},
                  {"threshold_graph", nullptr}};
  if (use_threshold) {
    summary["threshold"] = threshold;
    summary["threshold_graph"] = graph_key(threshold_edges(sum.mean_precision, threshold));
  }
  write_json(out.path("summary.json"), summary);

  if (cfg.get<bool>("write_samples", false)) {
    std::ostringstream os;
    for (std::size_t b = 0; b < chain.states.size(); ++b) {
      const auto& st = chain.states[b];
      json line = {{"draw", b},
                   {"graph", chain.adjacency[b]},
                   {"sigma2", st.sigma2},
                   {"s", to_json(st.decomp.s)},
                   {"c", upper_triangle(st.decomp.correlation())},
                   {"tau", upper_triangle(st.tau)},
                   {"q", upper_triangle(st.q)}};
      os << line.dump() << '\n';
    }
    write_text(out.path("samples.jsonl"), os.str());
  }
  out.manifest("fit", cfg, {cfg.require<std::string>("data")});
  spdlog::info("fit: {} retained draws, {} distinct graphs", chain.states.size(),
               post.visit_counts.size());
}

void cmd_fit_mixture(const Overrides& flags) {
  Config cfg(load_config(flags), "fit-mixture config",
             with(kMcmcKeys, {"data", "k_range", "hyperparameters", "top_k", "threshold"}));
  apply_flags(cfg, flags);
  const McmcConfig mcmc = mcmc_from(cfg);
  const auto ks = k_range_from(cfg);
  const int threads = cfg.get<int>("threads", 1);
  if (threads < 1) throw ConfigError("threads must be positive");
  Hyperparameters hp = hyper_from(cfg);
  const LabeledData in = load_data(cfg, "data");
  const Index p = in.data.p();
  validate_hyper(hp, p);
  for (int k : ks) {
    try {
      (void)hp.mixture_alpha(k);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  Outputs out(cfg.get<std::string>("out_dir", "out"));

  const KSelection sel = select_k(in.data, hp, mcmc, ks, threads);
  json table = json::array();
  json reports = json::array();
  for (std::size_t i = 0; i < sel.ks.size(); ++i) {
    const int k = sel.ks[i];
    if (!sel.fits[i]) {
      table.push_back({{"k", k}, {"bic", nullptr}, {"log_likelihood", nullptr},
                       {"parameters", nullptr}, {"error", sel.errors[i]}});
      continue;
    }
    const MixtureFit& fit = *sel.fits[i];
    table.push_back({{"k", k}, {"bic", fit.bic}, {"log_likelihood", fit.log_likelihood},
                     {"parameters", fit.parameters}, {"error", nullptr}});
    json clusters = json::array();
    for (int c = 0; c < k; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      const Adjacency& g = fit.estimate.graphs[uc];
      clusters.push_back(
          {{"index", c},
           {"size", members(fit.point_partition, c).size()},
           {"weight", fit.estimate.weights(c)},
           {"mean", to_json(fit.estimate.means[uc])},
           {"graph", graph_key(g)},
           {"edge_marginals", to_json(fit.edge_marginals[uc])},
           {"precision", to_json(fit.estimate.precisions[uc])}});
      if (k == sel.best_k) {
        write_text(out.path("cluster_" + std::to_string(c + 1) + ".dot"),
                   export_graph(g, fit.mean_correlations[uc], in.labels,
                                "cluster" + std::to_string(c + 1)));
      }
    }
    reports.push_back({{"k", k},
                       {"point_partition", partition_json(fit.point_partition)},
                       {"co_clustering", to_json(fit.co_clustering)},
                       {"acceptance", acceptance_json(fit.acceptance)},
                       {"clusters", clusters}});
  }
  json report = {{"command", "fit-mixture"},
                 {"p", p},
                 {"n", in.data.n()},
                 {"labels", in.labels},
                 {"seed", mcmc.seed},
                 {"best_k", sel.best_k},
                 {"bic_table", table},
                 {"reports", reports}};
  write_json(out.path("mixture.json"), report);
  out.manifest("fit-mixture", cfg, {cfg.require<std::string>("data")});
  spdlog::info("fit-mixture: selected K = {}", sel.best_k);
}

void cmd_fit_dp(const Overrides& flags) {
  Config cfg(load_config(flags), "fit-dp config",
             with(kMcmcKeys, {"data", "hyperparameters", "init_clusters", "ablate_likelihood",
                              "top_k", "threshold"}));
  apply_flags(cfg, flags);
  const McmcConfig mcmc = mcmc_from(cfg);
  Hyperparameters hp = hyper_from(cfg);
  DpOptions opts;
  opts.init_clusters = cfg.get<int>("init_clusters", opts.init_clusters);
  opts.ablate_likelihood = cfg.get<bool>("ablate_likelihood", false);
  if (opts.init_clusters < 1) throw ConfigError("init_clusters must be positive");
  const LabeledData in = load_data(cfg, "data");
  const Index p = in.data.p();
  validate_hyper(hp, p);
  Outputs out(cfg.get<std::string>("out_dir", "out"));

  const DpFit fit = run_dp_chain(in.data, hp, mcmc, opts);
  json posterior = json::object();
  for (const auto& [d, pr] : fit.d_n_posterior) posterior[std::to_string(d)] = pr;
  json clusters = json::array();
  for (std::size_t c = 0; c < fit.edge_marginals.size(); ++c) {
    const Adjacency g = median_probability_graph(fit.edge_marginals[c]);
    const std::string dot = "cluster_" + std::to_string(c + 1) + ".dot";
    write_text(out.path(dot), export_graph(g, fit.mean_correlations[c], in.labels,
                                           "cluster" + std::to_string(c + 1)));
    clusters.push_back({{"index", c},
                        {"size", members(fit.point_partition, static_cast<int>(c)).size()},
                        {"mean", to_json(fit.means[c])},
                        {"graph", graph_key(g)},
                        {"edge_marginals", to_json(fit.edge_marginals[c])},
                        {"dot", dot}});
  }
  json report = {{"command", "fit-dp"},
                 {"p", p},
                 {"n", in.data.n()},
                 {"labels", in.labels},
                 {"seed", mcmc.seed},
                 {"alpha", hp.dp_alpha},
                 {"d_n_posterior", posterior},
                 {"d_n_mode", fit.d_n_mode},
                 {"point_partition", partition_json(fit.point_partition)},
                 {"co_clustering", to_json(fit.co_clustering)},
                 {"acceptance", acceptance_json(fit.acceptance)},
                 {"clusters", clusters}};
  write_json(out.path("dp.json"), report);
  out.manifest("fit-dp", cfg, {cfg.require<std::string>("data")});
  spdlog::info("fit-dp: posterior mode of the cluster count is {}", fit.d_n_mode);
}

void cmd_evaluate(const Overrides& flags) {
  Config cfg(load_config(flags), "evaluate config",
             {"truth", "estimates", "threshold", "out_dir", "seed", "threads"});
  apply_flags(cfg, flags);
  const double t = cfg.get<double>("threshold", 0.0);
  if (!(t >= 0.0)) throw ConfigError("threshold must be nonnegative");
  const std::string truth_path = cfg.require<std::string>("truth");
  if (!cfg.has("estimates") || !cfg.raw("estimates").is_array() || cfg.raw("estimates").empty()) {
    throw ConfigError("estimates must be a nonempty array");
  }
  std::vector<std::string> inputs = {truth_path};
  const LabeledMatrix truth = read_matrix_csv(truth_path);
  const Index p = truth.values.rows();
  if (!is_pd(truth.values)) throw ConfigError(truth_path + ": truth is not positive definite");
  const Adjacency truth_edges = support(truth.values);
  Outputs out(cfg.get<std::string>("out_dir", "out"));

  json rows = json::array();
  std::ostringstream csv;
  csv << "name,kind,kl,mcc,sensitivity,specificity,fp_rate,fn_rate,tp,tn,fp,fn\n";
  const json& list = cfg.raw("estimates");
  for (std::size_t e = 0; e < list.size(); ++e) {
    const Config est(list[e], "estimates[" + std::to_string(e) + "]", {"name", "path", "kind"});
    const std::string path = est.require<std::string>("path");
    const std::string name = est.get<std::string>("name", fs::path(path).stem().string());
    const std::string kind = est.get<std::string>("kind", "precision");
    if (kind != "precision" && kind != "adjacency") {
      throw ConfigError("estimates[" + std::to_string(e) + "]: kind must be precision or adjacency");
    }
    inputs.push_back(path);
    const LabeledMatrix m = read_matrix_csv(path);
    if (m.values.rows() != p) {
      throw ConfigError(path + ": shape " + std::to_string(m.values.rows()) + " does not match truth " +
                        std::to_string(p));
    }
    double kl = std::numeric_limits<double>::quiet_NaN();
    Adjacency edges;
    if (kind == "precision") {
      if (!is_pd(m.values)) throw ConfigError(path + ": estimate is not positive definite");
      kl = kl_loss(truth.values, m.values);
      edges = threshold_edges(m.values, t);
    } else {
      edges = (m.values.array() != 0.0).cast<int>();
    }
    const ConfusionCounts cc = confusion(truth_edges, edges);
    const double vals[] = {mcc(cc), sensitivity(cc), specificity(cc), false_positive_rate(cc),
                           false_negative_rate(cc)};
    rows.push_back({{"name", name},
                    {"kind", kind},
                    {"kl", kind == "precision" ? json(kl) : json(nullptr)},
                    {"mcc", number_or_undefined(vals[0])},
                    {"sensitivity", number_or_undefined(vals[1])},
                    {"specificity", number_or_undefined(vals[2])},
                    {"fp_rate", number_or_undefined(vals[3])},
                    {"fn_rate", number_or_undefined(vals[4])},
                    {"tp", cc.tp},
                    {"tn", cc.tn},
                    {"fp", cc.fp},
                    {"fn", cc.fn}});
    csv << name << ',' << kind << ',' << (kind == "precision" ? format_double(kl) : "") ;
    for (double v : vals) csv << ',' << (std::isnan(v) ? "undefined" : format_double(v));
    csv << ',' << cc.tp << ',' << cc.tn << ',' << cc.fp << ',' << cc.fn << '\n';
  }
  write_json(out.path("evaluation.json"),
             {{"command", "evaluate"}, {"p", p}, {"threshold", t}, {"rows", rows}});
  write_text(out.path("evaluation.csv"), csv.str());
  out.manifest("evaluate", cfg, inputs);
}

void cmd_predict(const Overrides& flags) {
  Config cfg(load_config(flags), "predict config",
             with(kMcmcKeys, {"train", "test", "data", "train_size", "top_k", "threshold",
                              "hyperparameters"}));
  apply_flags(cfg, flags);
  const McmcConfig mcmc = mcmc_from(cfg);
  const int top = cfg.get<int>("top_k", 10);
  if (top < 1) throw ConfigError("top_k must be positive");
  Hyperparameters hp = hyper_from(cfg);

  LabeledData train;
  LabeledData test;
  std::vector<std::string> inputs;
  if (cfg.has("data")) {
    if (cfg.has("train") || cfg.has("test")) {
      throw ConfigError("give either data with train_size or train and test, not both");
    }
    const LabeledData all = load_data(cfg, "data");
    const Index n_train = cfg.require<Index>("train_size");
    if (n_train < 2 || n_train >= all.data.n()) {
      throw ConfigError("train_size must lie in [2, n)");
    }
    std::vector<Index> a(static_cast<std::size_t>(n_train));
    std::vector<Index> b(static_cast<std::size_t>(all.data.n() - n_train));
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), n_train);
    train = {all.data.columns(a), all.labels};
    test = {all.data.columns(b), all.labels};
    inputs.push_back(cfg.require<std::string>("data"));
  } else {
    train = load_data(cfg, "train");
    test = load_data(cfg, "test");
    if (train.data.p() != test.data.p()) throw ConfigError("train and test have different widths");
    inputs = {cfg.require<std::string>("train"), cfg.require<std::string>("test")};
  }
  validate_hyper(hp, train.data.p());
  Outputs out(cfg.get<std::string>("out_dir", "out"));

  const ChainOutput chain = run_chain(train.data.centered(), hp, mcmc);
  HeldOutPrediction mixed;
  HeldOutPrediction single;
  try {
    mixed = predict_held_out(train.data, test.data, chain, static_cast<std::size_t>(top));
    single = predict_held_out(train.data, test.data, chain, 1);
  } catch (const GraphUnvisited& e) {
    throw ConfigError(e.what());
  }
  json graphs = json::array();
  for (const auto& [key, prob] : mixed.graphs) graphs.push_back({{"key", key}, {"probability", prob}});
  write_data_csv(out.path("predictions.csv"), DataMatrix{mixed.predictions}, train.labels);
  write_json(out.path("predict.json"), {{"command", "predict"},
                                        {"p", train.data.p()},
                                        {"n_train", train.data.n()},
                                        {"n_test", test.data.n()},
                                        {"seed", mcmc.seed},
                                        {"top_k", top},
                                        {"pse", mixed.pse},
                                        {"single_best_pse", single.pse},
                                        {"graphs", graphs}});
  out.manifest("predict", cfg, inputs);
  spdlog::info("predict: PSE {} with {} graphs, {} with the best graph", mixed.pse, top, single.pse);
}

int run(const std::string& command, const Overrides& flags) {
  g_abort_dir = flags.out_dir.value_or("out");
  try {
    configure_logging();
    if (command == "simulate") cmd_simulate(flags);
    else if (command == "fit") cmd_fit(flags);
    else if (command == "fit-mixture") cmd_fit_mixture(flags);
    else if (command == "fit-dp") cmd_fit_dp(flags);
    else if (command == "evaluate") cmd_evaluate(flags);
    else if (command == "predict") cmd_predict(flags);
    else throw ConfigError("unknown command '" + command + "'");
    return kOk;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kIoError;
  } catch (const ChainAborted& e) {
    spdlog::error("{}", e.what());
    try {
      write_json(g_abort_dir / "abort.json", {{"iteration", e.iteration()},
                                          {"parameter", e.parameter()},
                                          {"reason", e.reason()}});
    } catch (const IoError&) {
    }
    return kNumericalAbort;
  } catch (const NumericalError& e) {
    spdlog::error("{}", e.what());
    try {
      write_json(g_abort_dir / "abort.json", {{"iteration", nullptr}, {"parameter", nullptr},
                                          {"reason", e.what()}});
    } catch (const IoError&) {
    }
    return kNumericalAbort;
  }
}

}  // namespace lassoggm::cli
