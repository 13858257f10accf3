#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tnload/circuit.hpp"
#include "tnload/linalg.hpp"
#include "tnload/simulator.hpp"

namespace tnload {
namespace {

// CNOT(0->1) * (H x I): maps |00> to the Bell state (|00> + |11>)/sqrt2.
Matrix4 bell_gate() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix4 u;
  u << r, 0, r, 0,
       0, r, 0, r,
       0, r, 0, -r,
       r, 0, -r, 0;
  return u;
}

LayeredCircuit bell_circuit() { return LayeredCircuit(2, {CircuitLayer(2, {{0, bell_gate()}})}); }

TEST(CircuitLayer, ValidatesGateSet) {
  EXPECT_NO_THROW(CircuitLayer::identity(5));
  EXPECT_EQ(CircuitLayer::identity(5).gates().front().site, 3);
  EXPECT_THROW(CircuitLayer(3, {{0, Matrix4::Identity()}}), ValidationError);
  EXPECT_THROW(CircuitLayer(3, {{0, Matrix4::Identity()}, {0, Matrix4::Identity()}}), ValidationError);
  EXPECT_THROW(CircuitLayer(3, {{0, Matrix4::Identity()}, {2, Matrix4::Identity()}}), ValidationError);
  EXPECT_THROW(LayeredCircuit(3, {}), ValidationError);
}

TEST(LayeredCircuit, FlatIndexingFollowsApplicationOrder) {
  std::mt19937_64 rng(1);
  auto c = testing::random_circuit(4, 3, rng);
  EXPECT_EQ(c.gate_count(), 9);
  EXPECT_EQ(c.gate(0).matrix, c.layers()[0].gates()[0].matrix);
  EXPECT_EQ(c.gate(5).matrix, c.layers()[1].gates()[2].matrix);
  const Matrix4 u = testing::random_gate(rng);
  c.set_gate(4, u);
  EXPECT_EQ(c.layers()[1].gates()[1].matrix, u);
  EXPECT_THROW(c.gate(9), ValidationError);
}

TEST(CnotCount, Formula) {
  EXPECT_EQ(circuit::cnot_count(8, 3), 42);
  EXPECT_EQ(circuit::cnot_count(10, 10), 180);
  EXPECT_EQ(circuit::cnot_count(2, 1), 2);
  std::mt19937_64 rng(2);
  EXPECT_EQ(circuit::cnot_count(testing::random_circuit(6, 4, rng)), 40);
}

TEST(Adjoint, InvertsCircuit) {
  std::mt19937_64 rng(3);
  const auto c = testing::random_circuit(4, 3, rng);
  const Matrix prod = testing::circuit_operator(circuit::adjoint(c)) * testing::circuit_operator(c);
  EXPECT_LT((prod - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EmbedIsometry, CompletesToUnitaryKeepingColumns) {
  std::mt19937_64 rng(4);
  for (int m : {1, 2, 3, 4}) {
    const Matrix v = testing::random_unitary(4, rng).leftCols(m);
    const Matrix u = circuit::embed_isometry(v);
    EXPECT_LT(linalg::unitarity_defect(u), 1e-12);
    EXPECT_LT((u.leftCols(m) - v).cwiseAbs().maxCoeff(), 1e-15);
  }
  // Column with a large overlap on e_0 forces the completion to skip it.
  Matrix v = Matrix::Zero(4, 1);
  v(0, 0) = 1.0;
  EXPECT_LT(linalg::unitarity_defect(circuit::embed_isometry(v)), 1e-12);
  EXPECT_THROW(circuit::embed_isometry(Matrix::Ones(4, 1)), ValidationError);
}

TEST(LayerFromChi2, PreparesTheStateExactly) {
  std::mt19937_64 rng(5);
  for (int n : {2, 3, 6, 10}) {
    for (bool real : {true, false}) {
      const Mps target = mps::from_dense(testing::random_state(n, rng, real), 2).mps;
      const Vector want = mps::to_dense(target);
      const auto layer = circuit::layer_from_chi2_mps(target);
      const LayeredCircuit c(n, {layer});
      const Vector got = sim::run(c).amplitudes();
      EXPECT_LT((got - want).norm(), 1e-10) << "n=" << n;
      for (const auto& g : layer.gates()) EXPECT_LT(linalg::unitarity_defect(g.matrix), 1e-12);
      if (real) EXPECT_TRUE(c.layers()[0].gates()[0].is_real());
    }
  }
}

TEST(LayerFromChi2, StaircaseOrder) {
  std::mt19937_64 rng(6);
  const Mps target = mps::from_dense(testing::random_state(5, rng), 2).mps;
  const auto layer = circuit::layer_from_chi2_mps(target);
  std::vector<int> sites;
  for (const auto& g : layer.gates()) sites.push_back(g.site);
  EXPECT_EQ(sites, (std::vector<int>{3, 2, 1, 0}));
}

TEST(LayerFromChi2, Errors) {
  std::mt19937_64 rng(7);
  EXPECT_THROW(circuit::layer_from_chi2_mps(mps::from_dense(testing::random_state(6, rng), 4).mps), ValidationError);
  EXPECT_THROW(circuit::layer_from_chi2_mps(testing::random_mps(4, 2, rng)), ValidationError);
}

TEST(Serialize, RoundTripIsExactRealAndComplex) {
  std::mt19937_64 rng(8);
  for (bool real : {true, false}) {
    for (bool binary : {true, false}) {
      auto c = testing::random_circuit(5, 3, rng, real);
      c.mutable_provenance().target_hash = "abc";
      c.mutable_provenance().chi = 2;
      c.mutable_provenance().history = {0.5, 0.75};
      c.mutable_provenance().extra["method"] = "grow";
      const auto text = circuit::serialize(c, {binary});
      const auto back = circuit::deserialize(text);
      EXPECT_EQ(back, c);
      EXPECT_EQ(circuit::serialize(back, {binary}), text);
    }
  }
}

TEST(Serialize, BellLayerGolden) {
  const std::string golden = R"GOLDEN({
 "format": "tnload-circuit",
 "layers": [
  [
   {
    "matrix": [
     [
      0.7071067811865475,
      0.0,
      0.7071067811865475,
      0.0
     ],
     [
      0.0,
      0.7071067811865475,
      0.0,
      0.7071067811865475
     ],
     [
      0.0,
      0.7071067811865475,
      0.0,
      -0.7071067811865475
     ],
     [
      0.7071067811865475,
      0.0,
      -0.7071067811865475,
      0.0
     ]
    ],
    "site": 0
   }
  ]
 ],
 "n_qubits": 2,
 "provenance": {
  "chi": 0,
  "extra": {},
  "history": [],
  "target_hash": ""
 },
 "version": 1
}
)GOLDEN";
  const std::string text = circuit::serialize(bell_circuit());
  EXPECT_EQ(text, golden) << text;
}

TEST(Deserialize, Errors) {
  const std::string good = circuit::serialize(bell_circuit());
  EXPECT_THROW(circuit::deserialize("{"), FormatError);
  auto bump = good;
  bump.replace(bump.find("\"version\": 1"), 12, "\"version\": 9");
  EXPECT_THROW(circuit::deserialize(bump), FormatError);
  EXPECT_THROW(circuit::deserialize(R"({"format":"tnload-circuit","version":1,"n_qubits":2,"layers":[[]]})"),
               FormatError);
  EXPECT_THROW(circuit::deserialize(R"({"format":"tnload-circuit","version":1,"n_qubits":2,"layers":[]})"),
               FormatError);
}

TEST(ExportGateList, OneLinePerGate) {
  std::mt19937_64 rng(9);
  const auto text = circuit::export_gate_list(testing::random_circuit(4, 2, rng, true));
  std::size_t lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  EXPECT_GE(lines, 6u);
}

}  // namespace
}  // namespace tnload
