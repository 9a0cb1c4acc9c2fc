#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qcr/reversal.hpp"

using namespace qcr;

namespace {

Layering chain_layering(const std::vector<std::string>& nodes) {
  Layering l;
  for (const auto& n : nodes) l.layers.push_back({n});
  return l;
}

struct Fixture {
  LayeredProcess lp;
  SchemeAssignment scheme;
};

Fixture qubit_chain(const std::vector<Segment>& segments) {
  const std::size_t k = segments.size() + 1;
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, Index>> dims;
  for (std::size_t j = 0; j < k; ++j) {
    nodes.push_back("N" + std::to_string(j + 1));
    dims.emplace_back(nodes.back(), 2);
  }
  return {LayeredProcess::unbiased_chain(chain_layering(nodes),
                                         std::vector<Index>(k, 2), segments),
          SchemeAssignment::sic_scheme(dims)};
}

}  // namespace

TEST_CASE("bayes_invert: doubly stochastic 2-outcome chain is symmetric") {
  std::vector<TableAxis> axes{{"A", {"0", "1"}}, {"B", {"0", "1"}}};
  // Symmetric doubly stochastic joint: uniform marginals both ways.
  auto t = OutcomeTable::from_probabilities(axes, {0.4, 0.1, 0.1, 0.4});
  Layering l = chain_layering({"A", "B"});
  auto fwd = layer_conditionals(t, l);
  auto bwd = bayes_invert(t, l);
  for (Index g = 0; g < 2; ++g) {
    for (Index v = 0; v < 2; ++v) {
      CHECK(bwd.steps[0].matrix(g, v) ==
            doctest::Approx(fwd.steps[0].matrix(g, v)).epsilon(1e-12));
    }
  }
}

TEST_CASE("bayes_invert: K=2 identity SIC chain gives symmetric overlaps") {
  auto f = qubit_chain({identity_segment(2)});
  auto t = observational_distribution(f.scheme, f.lp);
  auto bwd = bayes_invert(t, f.lp.layering);
  auto projectors = sic_projectors(2);
  for (Index y2 = 0; y2 < 4; ++y2) {
    for (Index y1 = 0; y1 < 4; ++y1) {
      const double expected =
          0.5 * (projectors[y2] * projectors[y1]).trace().real();
      CHECK(bwd.steps[0].matrix(y2, y1) ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("bayes_invert: reversed chain product reproduces the table") {
  auto f = qubit_chain({random_unbiased_segment(2, 2, 61),
                        random_unbiased_segment(2, 3, 62)});
  auto t = observational_distribution(f.scheme, f.lp);
  auto bwd = bayes_invert(t, f.lp.layering);
  auto rebuilt = chain_joint(bwd);
  // rebuilt axes are in reversed layer order; realign by node id.
  std::vector<std::string> order;
  for (const auto& a : t.axes()) order.push_back(a.node);
  CHECK(rebuilt.reordered(order).max_abs_difference(t) < 1e-12);
}

TEST_CASE("reverse_segment: identity channel is self-reverse") {
  auto rev = reverse_segment(identity_segment(2));
  CHECK(approx_equal(rev.matrix, identity_segment(2).matrix, 1e-12));
  CHECK(validate_reverse(rev).ok());
}

TEST_CASE("reverse_segment: unitary conjugation reverses to a valid map") {
  std::mt19937_64 rng(63);
  ComplexMatrix u = haar_unitary(2, rng);
  auto seg = Segment::from_channel(CPMap::from_kraus({u}));
  auto rev = reverse_segment(seg);
  CHECK(validate_reverse(rev).ok());
  CHECK(is_unbiased(rev).ok);
  // The reverse of conjugation-by-U acts as conjugation-by-U†.
  std::mt19937_64 rng2(64);
  ComplexMatrix rho = test::random_density(2, rng2);
  CHECK(approx_equal(rev.apply_to(rho), u.adjoint() * rho * u, 1e-10));
}

TEST_CASE("reverse_segment: biased input rejected, force reproduces the "
          "deterministic post-selection counterexample") {
  ComplexMatrix ket0 = ComplexMatrix::Zero(2, 1);
  ket0(0, 0) = 1.0;
  auto biased = discard_prepare_segment(2, ket0);
  CHECK_THROWS_WITH_AS(reverse_segment(biased),
                       doctest::Contains("biased"), ValidationError);

  auto forced = reverse_segment(biased, /*force=*/true);
  auto report = validate_reverse(forced);
  CHECK_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.condition == "tr_out W = I^in") {
      found = true;
      // tr over the former O factor leaves 2|psi><psi|; the operator-norm
      // gap to the identity equals ||psi><psi| - I|| = 1.
      CHECK(v.magnitude == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(found);
}

TEST_CASE("reverse_segment theorem: every unbiased segment reverses to a "
          "valid unbiased segment") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto seg = random_unbiased_segment(2, 1 + seed % 4, seed);
    auto rev = reverse_segment(seg);
    auto report = validate_reverse(rev);
    CHECK(report.ok());
    CHECK(report.psd_floor > -1e-9);
    CHECK(report.output_trace_dev < 1e-9);
    CHECK(report.trace_dev < 1e-9);
    CHECK(is_unbiased(rev).ok);
  }
  auto qt = reverse_segment(test::qubit_to_qutrit_unbiased_segment());
  CHECK(validate_reverse(qt).ok());
  CHECK(is_unbiased(qt).ok);
  CHECK(qt.matrix.trace().real() == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("reverse_process: double reversal restores the segments") {
  auto f = qubit_chain({random_unbiased_segment(2, 2, 71),
                        random_unbiased_segment(2, 3, 72)});
  auto [rev, rep1] = reverse_process(f.lp);
  CHECK(rep1.success);
  auto [back, rep2] = reverse_process(rev);
  REQUIRE(back.segments.size() == f.lp.segments.size());
  for (std::size_t j = 0; j < back.segments.size(); ++j) {
    CHECK((back.segments[j].matrix - f.lp.segments[j].matrix).norm() <
          1e-9);
  }
  CHECK(max_abs_diff(back.initial, f.lp.initial) < 1e-12);
}

TEST_CASE("reverse_process: identity chain maps to the identity chain") {
  auto f = qubit_chain({identity_segment(2), identity_segment(2)});
  auto [rev, report] = reverse_process(f.lp);
  CHECK(report.success);
  for (const auto& seg : rev.segments) {
    CHECK(approx_equal(seg.matrix, identity_segment(2).matrix, 1e-12));
  }
  // Layer order reversed.
  CHECK(rev.layering.layers.front() ==
        std::vector<std::string>{"N3"});
  CHECK(rev.layering.layers.back() == std::vector<std::string>{"N1"});
}

TEST_CASE("reverse_process: biased segment rejected by name") {
  ComplexMatrix ket0 = ComplexMatrix::Zero(2, 1);
  ket0(0, 0) = 1.0;
  auto f = qubit_chain({identity_segment(2),
                        discard_prepare_segment(2, ket0)});
  CHECK_THROWS_WITH_AS(reverse_process(f.lp),
                       doctest::Contains("segment 2"), ValidationError);

  std::mt19937_64 rng(73);
  auto lp = LayeredProcess::biased_chain(
      chain_layering({"N1", "N2"}), {2, 2}, test::random_density(2, rng),
      {random_unbiased_segment(2, 2, 74)});
  CHECK_THROWS_WITH_AS(reverse_process(lp), doctest::Contains("initial"),
                       ValidationError);
}

TEST_CASE("verify_reversibility: K=2 identity chain, exact table values") {
  auto f = qubit_chain({identity_segment(2)});
  auto report = verify_reversibility(f.lp, f.scheme);
  CHECK(report.success);
  CHECK(report.distribution_max_error < 1e-12);
  CHECK(report.conditional_max_error < 1e-12);
  CHECK(report.marginal_uniformity_dev < 1e-12);

  // Both tables carry {1/8 diagonal, 1/24 off-diagonal}.
  auto t = observational_distribution(f.scheme, f.lp);
  auto [rev, rep] = reverse_process(f.lp);
  auto tr = observational_distribution(f.scheme, rev);
  for (Index y1 = 0; y1 < 4; ++y1) {
    for (Index y2 = 0; y2 < 4; ++y2) {
      const double expected = (y1 == y2) ? 1.0 / 8.0 : 1.0 / 24.0;
      CHECK(t.at({y1, y2}) == doctest::Approx(expected).epsilon(1e-10));
      CHECK(tr.at({y2, y1}) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("verify_reversibility: random unbiased chains, K=3") {
  for (std::uint64_t seed : {81ull, 82ull, 83ull}) {
    auto f = qubit_chain({random_unbiased_segment(2, 2, seed),
                          random_unbiased_segment(2, 3, seed + 100)});
    auto report = verify_reversibility(f.lp, f.scheme);
    CHECK(report.success);
    CHECK(report.distribution_max_error < 1e-9);
    CHECK(report.conditional_max_error < 1e-9);
    CHECK(report.marginal_uniformity_dev < 1e-10);
  }
}

TEST_CASE("verify_reversibility: unequal dimensions (qubit -> qutrit)") {
  auto seg = test::qubit_to_qutrit_unbiased_segment();
  Layering l = chain_layering({"A", "B"});
  auto lp = LayeredProcess::unbiased_chain(l, {2, 3}, {seg});
  auto scheme = SchemeAssignment::sic_scheme({{"A", 2}, {"B", 3}});
  auto report = verify_reversibility(lp, scheme);
  CHECK(report.success);
  CHECK(report.distribution_max_error < 1e-9);
  CHECK(report.conditional_max_error < 1e-9);
}

TEST_CASE("verify_reversibility: qutrit chain") {
  auto seg = random_unbiased_segment(3, 2, 91);
  Layering l = chain_layering({"A", "B"});
  auto lp = LayeredProcess::unbiased_chain(l, {3, 3}, {seg});
  auto scheme = SchemeAssignment::sic_scheme({{"A", 3}, {"B", 3}});
  auto report = verify_reversibility(lp, scheme);
  CHECK(report.success);
  CHECK(report.distribution_max_error < 1e-9);
  // Qutrit SIC marginals sit at beta/d = (1/3)/3 = 1/9.
  auto t = observational_distribution(scheme, lp);
  auto m = t.marginal({"B"});
  for (Index i = 0; i < 9; ++i) {
    CHECK(std::abs(m.at_flat(i) - 1.0 / 9.0) < 1e-10);
  }
}

TEST_CASE("verify_reversibility: multi-node layer (two qubits -> one)") {
  std::mt19937_64 rng(92);
  ComplexMatrix u = haar_unitary(4, rng);
  std::vector<ComplexMatrix> kraus;
  for (Index k = 0; k < 2; ++k) {
    ComplexMatrix a = ComplexMatrix::Zero(2, 4);
    for (Index c = 0; c < 4; ++c) {
      for (Index r = 0; r < 2; ++r) a(r, c) = u(k * 2 + r, c);
    }
    kraus.push_back(a);
  }
  auto seg = Segment::from_channel(CPMap::from_kraus(kraus));
  REQUIRE(is_unbiased(seg).ok);
  Layering l;
  l.layers = {{"A", "B"}, {"C"}};
  auto lp = LayeredProcess::unbiased_chain(l, {4, 2}, {seg});
  auto scheme =
      SchemeAssignment::sic_scheme({{"A", 2}, {"B", 2}, {"C", 2}});
  auto report = verify_reversibility(lp, scheme);
  CHECK(report.success);
  CHECK(report.distribution_max_error < 1e-9);
  CHECK(report.conditional_max_error < 1e-9);
}

TEST_CASE("verify_reversibility: biased chain reported, not thrown") {
  ComplexMatrix ket0 = ComplexMatrix::Zero(2, 1);
  ket0(0, 0) = 1.0;
  auto f = qubit_chain({discard_prepare_segment(2, ket0)});
  auto report = verify_reversibility(f.lp, f.scheme);
  CHECK_FALSE(report.success);
  CHECK_FALSE(report.reversed_constructed);
  CHECK(report.failure.find("biased") != std::string::npos);
  // The forward marginals are non-uniform: P(y_2) = tr(|0><0| F_y2) is not
  // 1/4 for the tetrahedron outcomes.
  CHECK(report.marginal_uniformity_dev > 0.05);
  REQUIRE(report.segments.size() == 1);
  CHECK(report.segments[0].forward_unbiased_dev ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("barW to barW2 consistency: marginal ratios equal dim ratios") {
  // P(y_j)/P(y_{j+1}) · beta_{j+1}/beta_j = d_{j+1}/d_j on unbiased
  // chains, so the two reversed-segment constructions coincide.
  auto seg = test::qubit_to_qutrit_unbiased_segment();
  Layering l = chain_layering({"A", "B"});
  auto lp = LayeredProcess::unbiased_chain(l, {2, 3}, {seg});
  auto scheme = SchemeAssignment::sic_scheme({{"A", 2}, {"B", 3}});
  auto t = observational_distribution(scheme, lp);
  auto pa = t.marginal({"A"});
  auto pb = t.marginal({"B"});
  const double beta_a = 0.5, beta_b = 1.0 / 3.0;
  for (Index u = 0; u < pa.n_entries(); ++u) {
    for (Index v = 0; v < pb.n_entries(); ++v) {
      const double lhs =
          (pa.at_flat(u) / pb.at_flat(v)) * (beta_b / beta_a);
      CHECK(lhs == doctest::Approx(3.0 / 2.0).epsilon(1e-10));
    }
  }
}
