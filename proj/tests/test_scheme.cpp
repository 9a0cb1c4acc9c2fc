#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "qcr/scheme.hpp"

using namespace qcr;

namespace {

ComplexMatrix eye(Index d) { return ComplexMatrix::Identity(d, d); }

Layering chain_layering(const std::vector<std::string>& nodes) {
  Layering l;
  for (const auto& n : nodes) l.layers.push_back({n});
  return l;
}

// One-node-per-layer qubit chain fixture carrying both the library segment
// and the raw channel for the Kraus oracle.
struct ChainFixture {
  LayeredProcess lp;
  SchemeAssignment scheme;
  std::vector<CPMap> channels;
  std::vector<std::string> nodes;
};

ChainFixture identity_chain(std::size_t k) {
  ChainFixture f;
  for (std::size_t j = 0; j < k; ++j) f.nodes.push_back("N" + std::to_string(j + 1));
  std::vector<Segment> segments;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    f.channels.push_back(CPMap::from_kraus({eye(2)}));
    segments.push_back(identity_segment(2));
  }
  f.lp = LayeredProcess::unbiased_chain(chain_layering(f.nodes),
                                        std::vector<Index>(k, 2), segments);
  std::vector<std::pair<std::string, Index>> dims;
  for (const auto& n : f.nodes) dims.emplace_back(n, 2);
  f.scheme = SchemeAssignment::sic_scheme(dims);
  return f;
}

ChainFixture random_chain(std::size_t k, std::mt19937_64& rng) {
  ChainFixture f;
  for (std::size_t j = 0; j < k; ++j) f.nodes.push_back("N" + std::to_string(j + 1));
  std::vector<Segment> segments;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    f.channels.push_back(test::random_mixed_unitary_channel(2, 3, rng));
    segments.push_back(Segment::from_channel(f.channels.back()));
  }
  f.lp = LayeredProcess::unbiased_chain(chain_layering(f.nodes),
                                        std::vector<Index>(k, 2), segments);
  std::vector<std::pair<std::string, Index>> dims;
  for (const auto& n : f.nodes) dims.emplace_back(n, 2);
  f.scheme = SchemeAssignment::sic_scheme(dims);
  return f;
}

}  // namespace

TEST_CASE("born_probability: single-node reduction to tr(rho F)") {
  std::mt19937_64 rng(61);
  ComplexMatrix rho = test::random_density(2, rng);
  auto lp = LayeredProcess::biased_chain(chain_layering({"A"}), {2}, rho, {});
  auto w = assemble(lp);
  auto sic = sic_instrument(2, "A");
  auto projectors = sic_projectors(2);
  for (Index v = 0; v < 4; ++v) {
    double p = born_probability(lp.layering, {{"A", &sic.maps[v]}}, w);
    double expected = 0.5 * (rho * projectors[v]).trace().real();
    CHECK(p == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("born_probability: all-identity instruments give 1") {
  auto f = identity_chain(3);
  auto w = assemble(f.lp);
  std::map<std::string, const CPMap*> elements;
  auto ident = identity_instrument(2);
  for (const auto& n : f.nodes) elements[n] = &ident.maps[0];
  CHECK(born_probability(f.lp.layering, elements, w) ==
        doctest::Approx(1.0).epsilon(1e-10));

  std::mt19937_64 rng(62);
  auto g = random_chain(3, rng);
  auto wg = assemble(g.lp);
  CHECK(born_probability(g.lp.layering, elements, wg) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("born_probability: matches Kraus propagation on identity chain") {
  auto f = identity_chain(2);
  auto w = assemble(f.lp);
  auto sic = sic_instrument(2);
  std::vector<const CPMap*> channels{&f.channels[0]};
  for (Index y1 = 0; y1 < 4; ++y1) {
    for (Index y2 = 0; y2 < 4; ++y2) {
      std::map<std::string, const CPMap*> elements{
          {"N1", &sic.maps[y1]}, {"N2", &sic.maps[y2]}};
      double via_born = born_probability(f.lp.layering, elements, w);
      double via_kraus = test::kraus_chain_probability(
          f.lp.initial, {&sic.maps[y1], &sic.maps[y2]}, channels);
      CHECK(via_born == doctest::Approx(via_kraus).epsilon(1e-10));
    }
  }
}

TEST_CASE("observational_distribution: K=1 SIC table is uniform") {
  auto f = identity_chain(1);
  auto t = observational_distribution(f.scheme, f.lp);
  CHECK(t.n_entries() == 4);
  for (Index i = 0; i < 4; ++i) {
    CHECK(t.at_flat(i) == doctest::Approx(0.25).epsilon(1e-10));
  }
}

TEST_CASE("observational_distribution: K=2 identity chain values") {
  auto f = identity_chain(2);
  auto t = observational_distribution(f.scheme, f.lp);
  REQUIRE(t.n_entries() == 16);
  // P(y1,y2) = (1/4)·(1/2)tr(Π_y1 Π_y2): diagonal 1/8, off-diagonal 1/24.
  for (Index y1 = 0; y1 < 4; ++y1) {
    for (Index y2 = 0; y2 < 4; ++y2) {
      const double expected = (y1 == y2) ? 1.0 / 8.0 : 1.0 / 24.0;
      CHECK(t.at({y1, y2}) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
  CHECK(t.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("observational_distribution: multi-node layer with permutation") {
  std::mt19937_64 rng(63);
  // Layer 1 holds two qubits feeding one qubit in layer 2.
  Layering layering;
  layering.layers = {{"A", "B"}, {"C"}};
  auto channel = test::random_mixed_unitary_channel(2, 2, rng);
  // 4 -> 2 channel: trace out the first qubit after a Haar unitary on the
  // pair; Kraus A_k = (<k| ⊗ I)·U.
  ComplexMatrix u = haar_unitary(4, rng);
  std::vector<ComplexMatrix> kraus;
  for (Index k = 0; k < 2; ++k) {
    ComplexMatrix a = ComplexMatrix::Zero(2, 4);
    for (Index c = 0; c < 4; ++c) {
      for (Index r = 0; r < 2; ++r) {
        a(r, c) = u(k * 2 + r, c);
      }
    }
    kraus.push_back(a);
  }
  auto big_channel = CPMap::from_kraus(kraus);
  auto lp = LayeredProcess::unbiased_chain(
      layering, {4, 2}, {Segment::from_channel(big_channel)});
  auto scheme = SchemeAssignment::sic_scheme({{"A", 2}, {"B", 2}, {"C", 2}});
  auto t = observational_distribution(scheme, lp);
  CHECK(t.n_entries() == 4 * 4 * 4);
  CHECK(t.sum() == doctest::Approx(1.0).epsilon(1e-9));

  // Oracle: the layer-1 joint element is the Kronecker product of the two
  // node elements; propagate by hand.
  auto sic = sic_instrument(2);
  double max_err = 0.0;
  for (Index a = 0; a < 4; ++a) {
    for (Index b = 0; b < 4; ++b) {
      for (Index c = 0; c < 4; ++c) {
        std::vector<ComplexMatrix> joint_kraus{
            test::kron_oracle(sic.maps[a].kraus[0], sic.maps[b].kraus[0])};
        CPMap joint = CPMap::from_kraus(joint_kraus);
        double via_kraus = test::kraus_chain_probability(
            lp.initial, {&joint, &sic.maps[c]}, {&big_channel});
        max_err = std::max(max_err, std::abs(t.at({a, b, c}) - via_kraus));
      }
    }
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("born vs Kraus-propagation oracle on random chains, K<=3") {
  std::mt19937_64 rng(64);
  for (std::size_t k = 1; k <= 3; ++k) {
    auto f = random_chain(k, rng);
    auto t = observational_distribution(f.scheme, f.lp);
    auto sic = sic_instrument(2);
    std::vector<const CPMap*> channels;
    for (const auto& c : f.channels) channels.push_back(&c);
    double max_err = 0.0;
    t.for_each([&](const std::vector<Index>& multi, double p) {
      std::vector<const CPMap*> elements;
      for (Index y : multi) elements.push_back(&sic.maps[y]);
      max_err = std::max(
          max_err, std::abs(p - test::kraus_chain_probability(
                                    f.lp.initial, elements, channels)));
    });
    CHECK(max_err < 1e-10);
  }
}

TEST_CASE("marginal uniformity: unbiased chains have P(y_j) = 1/4") {
  std::mt19937_64 rng(65);
  auto f = random_chain(3, rng);
  auto t = observational_distribution(f.scheme, f.lp);
  for (const auto& node : f.nodes) {
    auto m = t.marginal({node});
    for (Index i = 0; i < 4; ++i) {
      CHECK(std::abs(m.at_flat(i) - 0.25) < 1e-10);
    }
  }
}

TEST_CASE("chain factorization: joint equals marginal-conditional product") {
  std::mt19937_64 rng(66);
  auto f = random_chain(3, rng);
  auto t = observational_distribution(f.scheme, f.lp);
  auto chain = layer_conditionals(t, f.lp.layering);
  auto rebuilt = chain_joint(chain);
  CHECK(t.max_abs_difference(rebuilt) < 1e-10);
}

TEST_CASE("layer_conditionals: identity chain gives (1/2)tr(Π1 Π2)") {
  auto f = identity_chain(2);
  auto t = observational_distribution(f.scheme, f.lp);
  auto chain = layer_conditionals(t, f.lp.layering);
  REQUIRE(chain.steps.size() == 1);
  auto projectors = sic_projectors(2);
  for (Index y1 = 0; y1 < 4; ++y1) {
    CHECK(chain.steps[0].row_present[y1]);
    for (Index y2 = 0; y2 < 4; ++y2) {
      const double expected =
          0.5 * (projectors[y1] * projectors[y2]).trace().real();
      CHECK(chain.steps[0].matrix(y1, y2) ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
  // And P(y1) is uniform.
  for (Index i = 0; i < 4; ++i) {
    CHECK(chain.first_marginal.at_flat(i) ==
          doctest::Approx(0.25).epsilon(1e-10));
  }
}

TEST_CASE("layer_conditionals: uniform independent table stays uniform") {
  std::vector<TableAxis> axes{{"A", {"0", "1"}}, {"B", {"0", "1"}}};
  auto t = OutcomeTable::from_probabilities(axes, {0.25, 0.25, 0.25, 0.25});
  Layering l;
  l.layers = {{"A"}, {"B"}};
  auto chain = layer_conditionals(t, l);
  for (Index g = 0; g < 2; ++g) {
    for (Index tt = 0; tt < 2; ++tt) {
      CHECK(chain.steps[0].matrix(g, tt) == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("layer_conditionals: zero-probability rows flagged absent") {
  std::vector<TableAxis> axes{{"A", {"0", "1"}}, {"B", {"0", "1"}}};
  auto t = OutcomeTable::from_probabilities(axes, {0.5, 0.5, 0.0, 0.0});
  Layering l;
  l.layers = {{"A"}, {"B"}};
  auto chain = layer_conditionals(t, l);
  CHECK(chain.steps[0].row_present[0]);
  CHECK_FALSE(chain.steps[0].row_present[1]);
}

TEST_CASE("intervened_distribution: no-op substitution equals observation") {
  std::mt19937_64 rng(67);
  auto f = random_chain(2, rng);
  auto obs = observational_distribution(f.scheme, f.lp);
  std::map<std::string, Instrument> subs{{"N1", sic_instrument(2, "N1")}};
  auto intv = intervened_distribution(f.scheme, subs, f.lp);
  CHECK(obs.max_abs_difference(intv) < 1e-12);
}

TEST_CASE("intervened_distribution: discard-prepare pins the next layer") {
  auto f = identity_chain(2);
  ComplexMatrix ket0 = ComplexMatrix::Zero(2, 1);
  ket0(0, 0) = 1.0;
  std::map<std::string, Instrument> subs{
      {"N1", discard_prepare_instrument(2, ket0, "N1")}};
  auto t = intervened_distribution(f.scheme, subs, f.lp);
  // Axis N1 now has the single "prepared" outcome; N2 marginals must be
  // tr(|0><0| F_y2).
  CHECK(t.n_entries() == 4);
  auto sic = sic_instrument(2);
  for (Index y2 = 0; y2 < 4; ++y2) {
    const double expected =
        (ket0 * ket0.adjoint() * povm_element(sic.maps[y2]))
            .trace()
            .real();
    CHECK(t.at({0, y2}) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("intervened_distribution: dimension mismatch rejected") {
  auto f = identity_chain(2);
  std::map<std::string, Instrument> subs{{"N1", sic_instrument(3, "N1")}};
  CHECK_THROWS_AS(intervened_distribution(f.scheme, subs, f.lp),
                  ValidationError);
  std::map<std::string, Instrument> ghost{{"NX", sic_instrument(2, "NX")}};
  CHECK_THROWS_AS(intervened_distribution(f.scheme, ghost, f.lp),
                  ValidationError);
}

TEST_CASE("born_probability: dimension mismatch rejected") {
  auto f = identity_chain(1);
  auto w = assemble(f.lp);
  auto sic3 = sic_instrument(3);
  CHECK_THROWS_AS(
      born_probability(f.lp.layering, {{"N1", &sic3.maps[0]}}, w),
      ValidationError);
  CHECK_THROWS_AS(born_probability(f.lp.layering, {}, w), ValidationError);
}

TEST_CASE("born_probability: imaginary residue triggers the convention "
          "diagnostic") {
  // A non-Hermitian "process" makes the contraction complex; the engine
  // must refuse rather than silently truncate.
  auto f = identity_chain(1);
  auto w = assemble(f.lp);
  w.matrix(0, 1) = Complex(0.0, 0.4);
  w.matrix(1, 0) = Complex(0.0, 0.4);  // not the conjugate: skew-Hermitian
  auto sic = sic_instrument(2);
  bool threw = false;
  try {
    for (Index v = 0; v < 4; ++v) {
      born_probability(f.lp.layering, {{"N1", &sic.maps[v]}}, w);
    }
  } catch (const ConventionError&) {
    threw = true;
  }
  CHECK(threw);
}

TEST_CASE("observational_distribution: threaded run matches sequential") {
  std::mt19937_64 rng(68);
  auto f = random_chain(3, rng);
  auto seq = observational_distribution(f.scheme, f.lp, 1);
  auto par = observational_distribution(f.scheme, f.lp, 4);
  CHECK(seq.max_abs_difference(par) == 0.0);
}

TEST_CASE("OutcomeTable: reorder and marginal bookkeeping") {
  std::vector<TableAxis> axes{{"A", {"0", "1"}}, {"B", {"0", "1", "2"}}};
  OutcomeTable t(axes);
  t.set({1, 2}, 0.5);
  t.set({0, 1}, 0.5);
  auto r = t.reordered({"B", "A"});
  CHECK(r.at({2, 1}) == doctest::Approx(0.5));
  CHECK(r.at({1, 0}) == doctest::Approx(0.5));
  auto m = t.marginal({"B"});
  CHECK(m.at_flat(1) == doctest::Approx(0.5));
  CHECK(m.at_flat(2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(t.set({0, 0}, -1e-6), ValidationError);
  std::vector<TableAxis> bad{{"A", {}}};
  CHECK_THROWS_AS(OutcomeTable{bad}, ValidationError);
}
