#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lassoggm/dp_mixture.hpp"
#include "lassoggm/graph.hpp"
#include "lassoggm/metrics.hpp"
#include "lassoggm/mixture.hpp"
#include "lassoggm/sampler.hpp"
#include "lassoggm/simgen.hpp"

namespace py = pybind11;
using namespace lassoggm;

namespace {

McmcConfig make_config(int iterations, int burn_in, int thin, std::uint64_t seed) {
  McmcConfig cfg;
  cfg.iterations = iterations;
  cfg.burn_in = burn_in;
  cfg.thin = thin;
  cfg.seed = seed;
  return cfg;
}

// Samples arrive as rows.
DataMatrix as_data(const Matrix& rows) { return DataMatrix::from_samples(rows); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian sparse Gaussian graphical models with lasso selection priors";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<GraphUnvisited>(m, "GraphUnvisited", PyExc_LookupError);

  m.def(
      "pd_interval",
      [](const Matrix& c, Index i, Index j) {
        const PdInterval iv = pd_interval(c, i, j, c(i, j));
        return py::make_tuple(iv.lo, iv.hi);
      },
      py::arg("c"), py::arg("i"), py::arg("j"),
      "Range of the (i, j) entry keeping a unit-diagonal matrix positive definite.");

  m.def(
      "generate",
      [](const std::string& structure, Index p, std::uint64_t seed, double pi) {
        StructureSpec spec;
        spec.kind = parse_structure(structure);
        spec.p = p;
        spec.seed = seed;
        spec.pi = pi;
        return generate(spec);
      },
      py::arg("structure"), py::arg("p"), py::arg("seed") = 1, py::arg("pi") = 0.1);

  m.def(
      "simulate_data",
      [](const Matrix& omega, Index n, std::uint64_t seed, std::optional<Vector> mean) {
        Rng rng(seed);
        const Vector mu = mean.value_or(Vector::Zero(omega.rows()));
        return Matrix(simulate_data(omega, n, mu, rng).y.transpose());
      },
      py::arg("omega"), py::arg("n"), py::arg("seed") = 1, py::arg("mean") = py::none(),
      "Returns an n x p array of draws from N(mean, omega^-1).");

  m.def("kl_loss", &kl_loss, py::arg("truth"), py::arg("estimate"));

  m.def(
      "threshold_edges",
      [](const Matrix& precision, double t) { return Matrix(threshold_edges(precision, t).cast<double>()); },
      py::arg("precision"), py::arg("threshold"));

  m.def(
      "confusion",
      [](const Matrix& truth, const Matrix& est) {
        const ConfusionCounts c = confusion((truth.array() != 0.0).cast<int>(), (est.array() != 0.0).cast<int>());
        py::dict d;
        d["tp"] = c.tp;
        d["tn"] = c.tn;
        d["fp"] = c.fp;
        d["fn"] = c.fn;
        d["mcc"] = mcc(c);
        d["sensitivity"] = sensitivity(c);
        d["specificity"] = specificity(c);
        return d;
      },
      py::arg("truth_adjacency"), py::arg("estimate_adjacency"));

  m.def("adjusted_rand_index", &adjusted_rand_index, py::arg("a"), py::arg("b"));

  m.def(
      "fit",
      [](const Matrix& samples, int iterations, int burn_in, int thin, std::uint64_t seed, std::size_t top) {
        const DataMatrix y = as_data(samples);
        ChainOutput chain;
        {
          py::gil_scoped_release release;
          chain = run_chain(y.centered(), Hyperparameters{}, make_config(iterations, burn_in, thin, seed));
        }
        const GraphPosterior post = tally(chain);
        const PosteriorSummary sum = summarize(chain);
        py::list graphs;
        for (const auto& [key, prob] : top_k(post, top)) graphs.append(py::make_tuple(key, prob));
        py::dict d;
        d["edge_marginals"] = Matrix(post.edge_marginals);
        d["posterior_mean_precision"] = Matrix(sum.mean_precision);
        d["median_graph"] = Matrix(median_probability_graph(post.edge_marginals).cast<double>());
        d["top_graphs"] = graphs;
        d["retained"] = chain.states.size();
        d["mean_sigma2"] = sum.mean_sigma2;
        return d;
      },
      py::arg("samples"), py::arg("iterations") = 20000, py::arg("burn_in") = 4000, py::arg("thin") = 4,
      py::arg("seed") = 1, py::arg("top_k") = 3,
      "Single-group chain on an n x p array (centered internally).");

  m.def(
      "fit_mixture",
      [](const Matrix& samples, std::vector<int> k_range, int iterations, int burn_in, int thin,
         std::uint64_t seed, int threads) {
        KSelection sel;
        {
          py::gil_scoped_release release;
          sel = select_k(as_data(samples), Hyperparameters{}, make_config(iterations, burn_in, thin, seed),
                         k_range, threads);
        }
        py::dict bics;
        py::dict partitions;
        for (std::size_t i = 0; i < sel.ks.size(); ++i) {
          if (!sel.fits[i]) continue;
          bics[py::int_(sel.ks[i])] = sel.fits[i]->bic;
          partitions[py::int_(sel.ks[i])] = sel.fits[i]->point_partition;
        }
        py::dict d;
        d["best_k"] = sel.best_k;
        d["bic"] = bics;
        d["point_partition"] = partitions;
        return d;
      },
      py::arg("samples"), py::arg("k_range") = std::vector<int>{1, 2, 3}, py::arg("iterations") = 20000,
      py::arg("burn_in") = 4000, py::arg("thin") = 4, py::arg("seed") = 1, py::arg("threads") = 1);

  m.def(
      "fit_dp",
      [](const Matrix& samples, int iterations, int burn_in, int thin, std::uint64_t seed, double alpha) {
        Hyperparameters hp;
        hp.dp_alpha = alpha;
        DpFit fit;
        {
          py::gil_scoped_release release;
          fit = run_dp_chain(as_data(samples), hp, make_config(iterations, burn_in, thin, seed));
        }
        py::dict d;
        d["d_n_posterior"] = fit.d_n_posterior;
        d["d_n_mode"] = fit.d_n_mode;
        d["point_partition"] = fit.point_partition;
        d["co_clustering"] = Matrix(fit.co_clustering);
        return d;
      },
      py::arg("samples"), py::arg("iterations") = 20000, py::arg("burn_in") = 4000, py::arg("thin") = 4,
      py::arg("seed") = 1, py::arg("alpha") = 1.0);

  m.def(
      "predict",
      [](const Matrix& train_rows, const Matrix& test_rows, std::size_t top, int iterations, int burn_in,
         int thin, std::uint64_t seed) {
        const DataMatrix train = as_data(train_rows);
        const DataMatrix test = as_data(test_rows);
        HeldOutPrediction mixed;
        HeldOutPrediction single;
        {
          py::gil_scoped_release release;
          const ChainOutput chain =
              run_chain(train.centered(), Hyperparameters{}, make_config(iterations, burn_in, thin, seed));
          mixed = predict_held_out(train, test, chain, top);
          single = predict_held_out(train, test, chain, 1);
        }
        py::dict d;
        d["predictions"] = Matrix(mixed.predictions.transpose());
        d["pse"] = mixed.pse;
        d["single_best_pse"] = single.pse;
        return d;
      },
      py::arg("train"), py::arg("test"), py::arg("top_k") = 10, py::arg("iterations") = 20000,
      py::arg("burn_in") = 4000, py::arg("thin") = 4, py::arg("seed") = 1);
}
