#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sgkit/experiment.hpp"
#include "sgkit/preconditioners.hpp"

#include "oracles.hpp"

using namespace sgkit;
using Catch::Approx;

namespace {

ExperimentConfig tiny_config(int dim, int order, FieldModel model = FieldModel::UniformKL) {
  ExperimentConfig cfg;
  cfg.model = model;
  cfg.dim = dim;
  cfg.order = order;
  cfg.nx = cfg.ny = 3;
  cfg.n_field_samples = 10;
  return cfg;
}

SparseMatrix identity_matrix(int n) {
  std::vector<Triplet> trips;
  for (int i = 0; i < n; ++i) trips.push_back({i, i, 1.0});
  return SparseMatrix::from_triplets(n, n, std::move(trips));
}

SparseMatrix zero_matrix(int n) { return SparseMatrix::from_triplets(n, n, {}); }

Eigen::MatrixXd dense_of(const SparseMatrix& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int p = a.row_ptr()[static_cast<std::size_t>(r)]; p < a.row_ptr()[static_cast<std::size_t>(r) + 1]; ++p)
      m(r, a.col_idx()[static_cast<std::size_t>(p)]) = a.values()[static_cast<std::size_t>(p)];
  return m;
}

/// Problem with the same tensor but all higher-order matrices zeroed.
SGOperator zero_higher_operator(const Problem& p) {
  auto mats = std::make_shared<std::vector<SparseMatrix>>();
  mats->push_back((*p.matrices)[0]);
  for (int i = 1; i < p.op.n_matrices(); ++i) mats->push_back(zero_matrix(p.op.block_len()));
  return SGOperator(std::shared_ptr<const std::vector<SparseMatrix>>(mats), p.op.tensor());
}

Eigen::MatrixXd mean_block_diag(const Problem& p) {
  const int n = p.op.block_len();
  const int nb = p.op.n_blocks();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nb * n, nb * n);
  const Eigen::MatrixXd k0 = dense_of(p.op.matrix(0));
  for (int k = 0; k < nb; ++k) m.block(k * n, k * n, n, n) = p.op.c0kk(k) * k0;
  return m;
}

void check_linear(const BlockOperator& prec, int nb, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const double alpha = dist(rng), beta = dist(rng);
  const auto r1 = oracle::random_block_vector(nb, n, seed + 1);
  const auto r2 = oracle::random_block_vector(nb, n, seed + 2);
  BlockVector combo = r1;
  combo.scale(alpha);
  combo.axpy(beta, r2);
  BlockVector z_combo(nb, n), z1(nb, n), z2(nb, n);
  prec.apply(combo, z_combo);
  prec.apply(r1, z1);
  prec.apply(r2, z2);
  z1.scale(alpha);
  z1.axpy(beta, z2);
  CHECK(oracle::rel_diff(z_combo, z1) < 1e-12);
}

void check_fixed_map(const BlockOperator& prec, int nb, int n, unsigned seed) {
  const auto r = oracle::random_block_vector(nb, n, seed);
  BlockVector z1(nb, n), z2(nb, n);
  prec.apply(r, z1);
  prec.apply(r, z2);
  for (std::size_t i = 0; i < z1.flat().size(); ++i) CHECK(z1.flat()[i] == z2.flat()[i]);
}

void check_full_rank(const BlockOperator& prec, int nb, int n) {
  const int dim = nb * n;
  Eigen::MatrixXd mat(dim, dim);
  BlockVector e(nb, n), z(nb, n);
  for (int c = 0; c < dim; ++c) {
    e.set_zero();
    e.flat()[static_cast<std::size_t>(c)] = 1.0;
    prec.apply(e, z);
    for (int r = 0; r < dim; ++r) mat(r, c) = z.flat()[static_cast<std::size_t>(r)];
  }
  CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(mat).rank() == dim);
}

}  // namespace

TEST_CASE("mean-based preconditioner", "[preconditioners]") {
  SECTION("identity mean returns the input") {
    const MeanSolver mean(identity_matrix(4), 1.0);
    const MeanBasedPrecond prec(mean);
    const auto r = oracle::random_block_vector(3, 4, 9);
    BlockVector z(3, 4);
    prec.apply(r, z);
    for (std::size_t i = 0; i < r.flat().size(); ++i)
      CHECK(z.flat()[i] == Approx(r.flat()[i]).margin(1e-15));
  }
  SECTION("block diagonality") {
    const Problem p = build_problem(tiny_config(1, 1));
    const MeanBasedPrecond prec(*p.mean);
    BlockVector r(p.op.n_blocks(), p.op.block_len()), z(p.op.n_blocks(), p.op.block_len());
    r.block(1)[2] = 1.0;
    prec.apply(r, z);
    for (double v : z.block(0)) CHECK(v == 0.0);
    bool any = false;
    for (double v : z.block(1)) any |= (v != 0.0);
    CHECK(any);
  }
  SECTION("matches the dense block-diagonal inverse") {
    const Problem p = build_problem(tiny_config(2, 2));
    const MeanBasedPrecond prec(*p.mean);
    const int nb = p.op.n_blocks(), n = p.op.block_len();
    const Eigen::MatrixXd k0 = dense_of(p.op.matrix(0));
    Eigen::MatrixXd bd = Eigen::MatrixXd::Zero(nb * n, nb * n);
    for (int k = 0; k < nb; ++k) bd.block(k * n, k * n, n, n) = k0;
    const auto r = oracle::random_block_vector(nb, n, 21);
    BlockVector z(nb, n);
    prec.apply(r, z);
    CHECK(oracle::rel_diff(z, oracle::dense_solve(bd, r)) < 1e-12);
    check_linear(prec, nb, n, 31);
    check_fixed_map(prec, nb, n, 32);
    check_full_rank(prec, nb, n);
  }
}

TEST_CASE("gauss-seidel preconditioner", "[preconditioners]") {
  const Problem p = build_problem(tiny_config(2, 2));
  const int nb = p.op.n_blocks(), n = p.op.block_len();

  SECTION("mean-only tensor reduces to the mean-based apply exactly") {
    std::vector<TripleProductTensor::Entry> kept;
    for (const auto& e : p.op.tensor().entries())
      if (e.i == 0) kept.push_back(e);
    std::vector<int> degrees;
    for (int i = 0; i < p.op.tensor().n_coeff(); ++i) degrees.push_back(p.op.tensor().coeff_degree(i));
    const TripleProductTensor t0(p.op.tensor().mode(), p.op.tensor().n_coeff(), nb, 1e-12,
                                 std::move(kept), std::move(degrees), 2, 2, PolyFamily::Legendre);
    const SGOperator op0(p.matrices, t0);
    const GaussSeidelPrecond gs(op0, *p.mean, 1);
    const MeanBasedPrecond mb(*p.mean);
    const auto r = oracle::random_block_vector(nb, n, 3);
    BlockVector zg(nb, n), zm(nb, n);
    gs.apply(r, zg);
    mb.apply(r, zm);
    for (std::size_t i = 0; i < zg.flat().size(); ++i) CHECK(zg.flat()[i] == zm.flat()[i]);
  }

  SECTION("one sweep equals dense block forward substitution") {
    const GaussSeidelPrecond gs(p.op, *p.mean, 1);
    const Eigen::MatrixXd full = p.op.assemble_explicit();
    Eigen::MatrixXd m = mean_block_diag(p);
    for (int k = 0; k < nb; ++k)
      for (int j = 0; j < k; ++j)
        m.block(k * n, j * n, n, n) = full.block(k * n, j * n, n, n);
    const auto r = oracle::random_block_vector(nb, n, 5);
    BlockVector z(nb, n);
    gs.apply(r, z);
    CHECK(oracle::rel_diff(z, oracle::dense_solve(m, r)) < 1e-10);
    check_linear(gs, nb, n, 55);
    check_fixed_map(gs, nb, n, 56);
    check_full_rank(gs, nb, n);
  }

  SECTION("n_outer validation and multi-sweep progress") {
    CHECK_THROWS_AS(GaussSeidelPrecond(p.op, *p.mean, 0), std::invalid_argument);
    // two sweeps are closer to the exact solve than one
    const GaussSeidelPrecond gs1(p.op, *p.mean, 1), gs2(p.op, *p.mean, 2);
    const auto expect = oracle::dense_solve(p.op.assemble_explicit(), p.rhs);
    BlockVector z1(nb, n), z2(nb, n);
    gs1.apply(p.rhs, z1);
    gs2.apply(p.rhs, z2);
    CHECK(oracle::rel_diff(z2, expect) < oracle::rel_diff(z1, expect));
  }
}

TEST_CASE("approximate gauss-seidel preconditioner", "[preconditioners]") {
  SECTION("vanishing first-order matrices reduce to the mean-based apply") {
    const Problem p = build_problem(tiny_config(2, 2));
    const SGOperator op0 = zero_higher_operator(p);
    const ApproxGaussSeidelPrecond ags(op0, *p.mean);
    const MeanBasedPrecond mb(*p.mean);
    const auto r = oracle::random_block_vector(p.op.n_blocks(), p.op.block_len(), 7);
    BlockVector za(r.n_blocks(), r.block_len()), zm(r.n_blocks(), r.block_len());
    ags.apply(r, za);
    mb.apply(r, zm);
    for (std::size_t i = 0; i < za.flat().size(); ++i) CHECK(za.flat()[i] == zm.flat()[i]);
  }
  SECTION("PCE mode: sweep on the first-order restriction") {
    const Problem p = build_problem(tiny_config(2, 2, FieldModel::Lognormal));
    const ApproxGaussSeidelPrecond ags(p.op, *p.mean);
    const GaussSeidelPrecond gs_fo(ags.first_order_operator(), *p.mean, 1);
    const auto r = oracle::random_block_vector(p.op.n_blocks(), p.op.block_len(), 8);
    BlockVector za(r.n_blocks(), r.block_len()), zg(r.n_blocks(), r.block_len());
    ags.apply(r, za);
    gs_fo.apply(r, zg);
    for (std::size_t i = 0; i < za.flat().size(); ++i) CHECK(za.flat()[i] == zg.flat()[i]);
    check_linear(ags, p.op.n_blocks(), p.op.block_len(), 91);
    check_fixed_map(ags, p.op.n_blocks(), p.op.block_len(), 92);
    check_full_rank(ags, p.op.n_blocks(), p.op.block_len());
  }
}

TEST_CASE("approximate jacobi preconditioner", "[preconditioners]") {
  const Problem p = build_problem(tiny_config(2, 2, FieldModel::Lognormal));
  const int nb = p.op.n_blocks(), n = p.op.block_len();
  const ApproxJacobiPrecond aj(p.op, *p.mean);
  const MeanBasedPrecond mb(*p.mean);

  SECTION("first sweep is the mean-based apply") {
    const auto r = oracle::random_block_vector(nb, n, 13);
    BlockVector z1(nb, n), zm(nb, n);
    aj.first_sweep(r, z1);
    mb.apply(r, zm);
    for (std::size_t i = 0; i < z1.flat().size(); ++i) CHECK(z1.flat()[i] == zm.flat()[i]);
  }
  SECTION("zero off-diagonal terms reduce to the mean-based apply") {
    const Problem pu = build_problem(tiny_config(2, 2));
    const SGOperator op0 = zero_higher_operator(pu);
    const ApproxJacobiPrecond aj0(op0, *pu.mean);
    const MeanBasedPrecond mb0(*pu.mean);
    const auto r = oracle::random_block_vector(pu.op.n_blocks(), pu.op.block_len(), 14);
    BlockVector za(r.n_blocks(), r.block_len()), zm(r.n_blocks(), r.block_len());
    aj0.apply(r, za);
    mb0.apply(r, zm);
    for (std::size_t i = 0; i < za.flat().size(); ++i) CHECK(za.flat()[i] == zm.flat()[i]);
  }
  SECTION("matches the dense two-sweep stationary oracle") {
    const Eigen::MatrixXd fo_full = aj.first_order_operator().assemble_explicit();
    const Eigen::MatrixXd higher = fo_full - mean_block_diag(p);
    const Eigen::MatrixXd bd = mean_block_diag(p);
    const auto r = oracle::random_block_vector(nb, n, 15);
    const auto u1 = oracle::dense_solve(bd, r);
    BlockVector rhs = r;
    {
      Eigen::Map<const Eigen::VectorXd> um(u1.data(), nb * n);
      Eigen::VectorXd hv = higher * um;
      for (int i = 0; i < hv.size(); ++i) rhs.flat()[static_cast<std::size_t>(i)] -= hv[i];
    }
    const auto expect = oracle::dense_solve(bd, rhs);
    BlockVector z(nb, n);
    aj.apply(r, z);
    CHECK(oracle::rel_diff(z, expect) < 1e-12);
    check_linear(aj, nb, n, 77);
    check_fixed_map(aj, nb, n, 78);
    check_full_rank(aj, nb, n);
  }
}

TEST_CASE("kronecker product preconditioner", "[preconditioners]") {
  SECTION("zero higher matrices give G = I and the mean-based apply") {
    const Problem p = build_problem(tiny_config(2, 2));
    const SGOperator op0 = zero_higher_operator(p);
    const KroneckerPrecond kp(op0, *p.mean);
    CHECK((kp.g_matrix() - Eigen::MatrixXd::Identity(p.op.n_blocks(), p.op.n_blocks()))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    const MeanBasedPrecond mb(*p.mean);
    const auto r = oracle::random_block_vector(p.op.n_blocks(), p.op.block_len(), 19);
    BlockVector zk(r.n_blocks(), r.block_len()), zm(r.n_blocks(), r.block_len());
    kp.apply(r, zk);
    mb.apply(r, zm);
    CHECK(oracle::rel_diff(zk, zm) < 1e-13);
  }
  SECTION("K_1 = K_0 gives unit trace weight") {
    const Problem p = build_problem(tiny_config(1, 1));
    auto mats = std::make_shared<std::vector<SparseMatrix>>();
    mats->push_back((*p.matrices)[0]);
    mats->push_back((*p.matrices)[0]);
    const SGOperator op(std::shared_ptr<const std::vector<SparseMatrix>>(mats), p.op.tensor());
    const KroneckerPrecond kp(op, *p.mean);
    CHECK(kp.trace_weights()[0] == 1.0);
    CHECK(kp.trace_weights()[1] == 1.0);
  }
  SECTION("trace weights match the dense oracle") {
    const Problem p = build_problem(tiny_config(2, 2));
    const KroneckerPrecond kp(p.op, *p.mean);
    const Eigen::MatrixXd k0 = dense_of(p.op.matrix(0));
    const double t00 = (k0.cwiseProduct(k0)).sum();
    for (int i = 0; i < p.op.tensor().n_coeff(); ++i) {
      const double expect = (dense_of(p.op.matrix(i)).cwiseProduct(k0)).sum() / t00;
      CHECK(kp.trace_weights()[static_cast<std::size_t>(i)] == Approx(expect).margin(1e-14));
    }
  }
  SECTION("apply matches the dense Kronecker inverse") {
    const Problem p = build_problem(tiny_config(2, 2, FieldModel::Lognormal));
    const int nb = p.op.n_blocks(), n = p.op.block_len();
    const KroneckerPrecond kp(p.op, *p.mean);
    const Eigen::MatrixXd k0 = dense_of(p.op.matrix(0));
    const Eigen::MatrixXd& g = kp.g_matrix();
    Eigen::MatrixXd kron(nb * n, nb * n);
    for (int j = 0; j < nb; ++j)
      for (int k = 0; k < nb; ++k) kron.block(j * n, k * n, n, n) = g(j, k) * k0;
    const auto r = oracle::random_block_vector(nb, n, 23);
    BlockVector z(nb, n);
    kp.apply(r, z);
    CHECK(oracle::rel_diff(z, oracle::dense_solve(kron, r)) < 1e-11);
    check_linear(kp, nb, n, 61);
    check_fixed_map(kp, nb, n, 62);
    check_full_rank(kp, nb, n);
  }
}
