#include <doctest.h>

#include <regex>
#include <sstream>

#include "lassoggm/graph.hpp"
#include "lassoggm/metrics.hpp"
#include "lassoggm/simgen.hpp"

using namespace lassoggm;

namespace {

ChainOutput fake_chain(const std::vector<GraphKey>& keys, Index p) {
  ChainOutput c;
  c.dim = p;
  for (std::size_t b = 0; b < keys.size(); ++b) {
    GgmChainState st;
    st.decomp = PrecisionDecomposition::identity(p);
    st.decomp.a = adjacency_from_key(keys[b], p);
    st.decomp.r = SymMatrix::Identity(p, p);
    for (Index i = 0; i < p; ++i) {
      for (Index j = i + 1; j < p; ++j) st.decomp.r(i, j) = st.decomp.r(j, i) = 0.1 * static_cast<double>(b % 3);
    }
    st.tau = Matrix::Ones(p, p);
    st.q = Matrix::Constant(p, p, 0.5);
    st.sigma2 = 1.0 + static_cast<double>(b);
    c.states.push_back(st);
    c.adjacency.push_back(keys[b]);
  }
  return c;
}

}  // namespace

TEST_CASE("tally counts patterns exactly") {
  const GraphPosterior one = tally(std::vector<GraphKey>{"101"}, 3);
  CHECK(one.total == 1);
  CHECK(one.probability("101") == 1.0);
  CHECK(one.probability("000") == 0.0);

  const std::vector<GraphKey> keys = {"100", "100", "001", "111", "100"};
  const GraphPosterior post = tally(keys, 3);
  std::size_t sum = 0;
  for (const auto& [k, v] : post.visit_counts) sum += v;
  CHECK(sum == post.total);
  CHECK(post.probability("100") == doctest::Approx(0.6));
  // Marginals equal the frequency-weighted average of the pattern indicators.
  CHECK(post.edge_marginals(0, 1) == doctest::Approx(0.8));
  CHECK(post.edge_marginals(1, 2) == doctest::Approx(0.4));
  CHECK(post.edge_marginals(0, 2) == doctest::Approx(0.2));
  CHECK(post.edge_marginals(1, 1) == 0.0);
  CHECK_THROWS_AS(tally(std::vector<GraphKey>{}, 3), std::invalid_argument);
}

TEST_CASE("top_k ordering") {
  const GraphPosterior post = tally(std::vector<GraphKey>{"110", "011", "011", "110", "000"}, 3);
  const auto top = top_k(post, 2);
  REQUIRE(top.size() == 2);
  // Tie on probability: the smaller key first.
  CHECK(top[0].first == "011");
  CHECK(top[1].first == "110");
  CHECK(top[0].second == doctest::Approx(0.4));
  CHECK(top_k(post, 10).size() == 3);
  CHECK_THROWS_AS(top_k(post, 0), std::invalid_argument);
}

TEST_CASE("median probability graph") {
  SymMatrix m = SymMatrix::Zero(3, 3);
  m(0, 1) = m(1, 0) = 0.5;
  m(0, 2) = m(2, 0) = 0.49;
  m(1, 2) = m(2, 1) = 0.9;
  const Adjacency a = median_probability_graph(m);
  CHECK(a(0, 1) == 1);
  CHECK(a(0, 2) == 0);
  CHECK(a(1, 2) == 1);
  CHECK(a(0, 0) == 1);
}

TEST_CASE("per-graph means") {
  const ChainOutput chain = fake_chain({"100", "000", "100"}, 3);
  const SymMatrix pm = graph_mean_precision(chain, "100");
  // sigma^2 is 1 and 3 on the two visits to "100".
  CHECK(pm(0, 0) == doctest::Approx(0.5 * (1.0 + 1.0 / 3.0)));
  const SymMatrix cm = graph_mean_correlation(chain, "100");
  CHECK(cm(0, 1) == doctest::Approx(0.5 * (0.0 + 0.2)));
  CHECK(cm(1, 2) == 0.0);
  CHECK_THROWS_AS(graph_mean_precision(chain, "111"), GraphUnvisited);
}

TEST_CASE("conditional predictions") {
  const Vector mu = Vector::Constant(3, 2.0);
  Matrix test(3, 2);
  test << 1, 5, 0, 0, 3, -1;
  const Matrix diag = conditional_predictions(SymMatrix::Identity(3, 3) * 4.0, mu, test);
  CHECK((diag.array() == 2.0).all());

  // Bivariate regression: E[y1 | y2] = mu1 + (s12 / s22)(y2 - mu2).
  SymMatrix cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.5;
  const SymMatrix omega = cov.inverse();
  Vector m2(2);
  m2 << 0.5, -1.0;
  Matrix t2(2, 1);
  t2 << 3.0, 0.7;
  const Matrix pred = conditional_predictions(omega, m2, t2);
  CHECK(std::abs(pred(0, 0) - (0.5 + 0.6 / 1.5 * (0.7 + 1.0))) < 1e-12);
  CHECK(std::abs(pred(1, 0) - (-1.0 + 0.6 / 2.0 * (3.0 - 0.5))) < 1e-12);
  CHECK_THROWS_AS(conditional_predictions(omega, mu, t2), std::invalid_argument);
}

TEST_CASE("predict_held_out") {
  Rng rng(1);
  const DataMatrix train = simulate_data(SymMatrix::Identity(3, 3), 10, Vector::Zero(3), rng);
  const DataMatrix test = simulate_data(SymMatrix::Identity(3, 3), 4, Vector::Zero(3), rng);

  // One visited graph: k = 1 is the unmixed prediction.
  const ChainOutput single = fake_chain({"110", "110"}, 3);
  const HeldOutPrediction h = predict_held_out(train, test, single, 1);
  const Matrix direct = conditional_predictions(graph_mean_precision(single, "110"), train.mean(), test.y);
  CHECK((h.predictions - direct).norm() < 1e-14);
  CHECK(h.pse == doctest::Approx(predictive_squared_error(direct, test.y)));
  CHECK_THROWS_AS(predict_held_out(train, test, single, 2), GraphUnvisited);

  // Two graphs: the equal-weight average of the two predictions.
  const ChainOutput two = fake_chain({"110", "001", "110"}, 3);
  const HeldOutPrediction m = predict_held_out(train, test, two, 2);
  const Matrix avg = 0.5 * (conditional_predictions(graph_mean_precision(two, "110"), train.mean(), test.y) +
                            conditional_predictions(graph_mean_precision(two, "001"), train.mean(), test.y));
  CHECK((m.predictions - avg).norm() < 1e-14);
}

TEST_CASE("DOT export") {
  const auto labels = default_labels(3);
  CHECK(labels[2] == "X3");
  const std::string empty = export_graph(Adjacency::Identity(3, 3), SymMatrix::Identity(3, 3), labels);
  CHECK(empty.find("--") == std::string::npos);
  CHECK(empty.find("\"X1\";") != std::string::npos);

  SymMatrix c = SymMatrix::Identity(3, 3);
  c(0, 1) = c(1, 0) = 0.3;   // partial correlation -0.3: red
  c(1, 2) = c(2, 1) = -0.2;  // partial correlation 0.2: green
  c(0, 2) = c(2, 0) = 0.1;
  const std::string full = export_graph(Adjacency::Ones(3, 3), c, labels, "full");
  std::size_t edges = 0;
  for (std::size_t pos = full.find("--"); pos != std::string::npos; pos = full.find("--", pos + 2)) ++edges;
  CHECK(edges == 3);
  CHECK(full.find("\"X1\" -- \"X2\" [color=red]") != std::string::npos);
  CHECK(full.find("\"X2\" -- \"X3\" [color=green]") != std::string::npos);

  // Grammar check: header, node and edge statements, closing brace.
  std::istringstream in(full);
  std::string line;
  std::getline(in, line);
  CHECK(std::regex_match(line, std::regex(R"(graph "[^"]*" \{)")));
  const std::regex stmt(R"(  "[^"]+"( -- "[^"]+" \[color=(red|green)\])?;)");
  int statements = 0;
  while (std::getline(in, line) && line != "}") {
    CHECK(std::regex_match(line, stmt));
    ++statements;
  }
  CHECK(line == "}");
  CHECK(statements == 6);
  CHECK_THROWS_AS(export_graph(Adjacency::Ones(3, 3), c, default_labels(2)), std::invalid_argument);
}
