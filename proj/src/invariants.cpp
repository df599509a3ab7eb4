#include "circlaw/invariants.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "circlaw/limit_law.hpp"
#include "circlaw/linearization.hpp"
#include "circlaw/spectra.hpp"
#include "circlaw/verification.hpp"

namespace circlaw {

namespace {

// Largest distance in a greedy nearest matching of two multisets.
double multiset_gap(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const Complex& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](const Complex& p, const Complex& q) {
      return std::abs(p - x) < std::abs(q - x);
    });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

std::shared_ptr<const BlockLinearization> random_linearization(int n, int m, std::uint64_t seed,
                                                               std::uint64_t trial) {
  EnsembleSpec spec;
  spec.n = n;
  spec.m = m;
  spec.base_seed = seed;
  return std::make_shared<const BlockLinearization>(
      BlockLinearization::build(ProductModel::sample(spec, trial)));
}

struct Tally {
  InvariantResult r;
  explicit Tally(std::string name) { r.name = std::move(name); r.pass = true; }
  void add(double violation) {
    ++r.cases;
    r.worst = std::max(r.worst, violation);
    if (!(violation <= 1.0)) r.pass = false;
  }
};

InvariantResult hermitization_identity(std::uint64_t seed) {
  Tally t("hermitization eig(V) = +-svd(W - zI), nm <= 16");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uint64_t trial = 0;
  for (int m = 1; m <= 2; ++m) {
    for (int n = 2; n * m <= 16; ++n) {
      for (int rep = 0; rep < 3; ++rep) {
        auto W = random_linearization(n, m, seed, trial++);
        const Complex z = rep == 0 ? Complex(u(rng), 0.0) : Complex(u(rng), u(rng));
        const ShiftedMatrix S = shift(W, z);
        const Eigen::MatrixXcd V = hermitize(S).V;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(V, Eigen::EigenvaluesOnly);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S.dense());
        const Eigen::VectorXd sv = svd.singularValues();
        std::vector<double> expected;
        for (Eigen::Index k = 0; k < sv.size(); ++k) {
          expected.push_back(sv[k]);
          expected.push_back(-sv[k]);
        }
        std::sort(expected.begin(), expected.end());
        const double scale = 1e-10 * std::max(1.0, sv[0]);
        double gap = 0.0;
        for (std::size_t k = 0; k < expected.size(); ++k) {
          gap = std::max(gap, std::abs(es.eigenvalues()[static_cast<Eigen::Index>(k)] - expected[k]));
        }
        t.add(gap / scale);
        // library paths against the same reference
        for (auto solver : {SpectrumSolver::svd, SpectrumSolver::hermitian}) {
          const auto sp = singular_spectrum(S, WeightMode::none, solver);
          t.add((sp.values - sv).cwiseAbs().maxCoeff() / scale);
        }
        // exact conjugate symmetry
        t.add((V - V.adjoint()).cwiseAbs().maxCoeff() == 0.0 ? 0.0 : 2.0);
      }
    }
  }
  return t.r;
}

InvariantResult power_identity(std::uint64_t seed) {
  Tally t("eig(W^m) = eig(X) with multiplicity m, n <= 8");
  std::uint64_t trial = 100;
  for (int m = 1; m <= 3; ++m) {
    for (int n = 2; n <= 8; ++n) {
      EnsembleSpec spec;
      spec.n = n;
      spec.m = m;
      spec.base_seed = seed;
      const ProductModel pm = ProductModel::sample(spec, trial++);
      const Eigen::MatrixXd W = BlockLinearization::build(pm).W();
      Eigen::MatrixXd Wm = Eigen::MatrixXd::Identity(W.rows(), W.cols());
      for (int k = 0; k < m; ++k) Wm = Wm * W;
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Wm.cast<Complex>(), false);
      std::vector<Complex> lhs(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
      const auto x = product_eigenvalues(product_matrix(pm)).eigenvalues;
      std::vector<Complex> rhs;
      for (int k = 0; k < m; ++k) rhs.insert(rhs.end(), x.begin(), x.end());
      t.add(multiset_gap(lhs, rhs) / 1e-8);
    }
  }
  return t.r;
}

InvariantResult resolvent_checks(std::uint64_t seed, bool identity) {
  Tally t(identity ? "resolvent identity, nm <= 64" : "resolvent row-sum bound, nm <= 64");
  std::mt19937_64 rng(seed + (identity ? 7 : 11));
  std::uniform_real_distribution<double> uu(-3.0, 3.0), lv(-3.0, 1.0);
  const int sizes[][2] = {{4, 1}, {8, 2}, {16, 2}, {32, 1}, {8, 4}};
  std::uint64_t trial = 200;
  int done = 0;
  while (done < 100) {
    for (const auto& nm : sizes) {
      auto W = random_linearization(nm[0], nm[1], seed, trial++);
      const Eigen::MatrixXcd V = hermitize(shift(W, {uu(rng) / 3.0, uu(rng) / 3.0})).V;
      const Complex w1(uu(rng), std::pow(10.0, lv(rng)));
      if (identity) {
        const Complex w2(uu(rng), std::pow(10.0, lv(rng)));
        const auto ic = resolvent_identity_check(V, w1, w2);
        t.add(ic.residual / (1e-10 * ic.scale));
      } else {
        const auto j = std::uniform_int_distribution<Eigen::Index>(0, V.rows() - 1)(rng);
        const auto rc = resolvent_row_check(V, w1, j);
        t.add(rc.holds ? 0.0 : 2.0);
      }
      if (++done == 100) break;
    }
  }
  return t.r;
}

InvariantResult descent_checks(std::uint64_t seed) {
  Tally t("1-descent of |R_jj| and Im R_jj, nm <= 64, s in {1.5, 2, 4}");
  std::uint64_t trial = 400;
  const int sizes[][2] = {{8, 1}, {16, 2}, {32, 1}};
  const double points[][2] = {{0.0, 0.5}, {0.7, 0.05}, {-1.9, 0.2}, {2.5, 1.0}};
  for (const auto& nm : sizes) {
    auto W = random_linearization(nm[0], nm[1], seed, trial++);
    const Eigen::MatrixXcd V = hermitize(shift(W, {0.5, 0.1})).V;
    for (const auto& p : points) {
      for (double s : {1.5, 2.0, 4.0}) {
        for (Eigen::Index j = 0; j < V.rows(); ++j) {
          t.add(descent_property_check(V, p[0], p[1], s, j) ? 0.0 : 2.0);
        }
      }
    }
  }
  return t.r;
}

InvariantResult partial_trace_identity(std::uint64_t seed) {
  Tally t("partial traces average to m_n");
  std::uint64_t trial = 500;
  const Complex ws[] = {{0.3, 0.5}, {0.0, 0.01}, {-2.0, 1.0}, {1.1, 0.001}};
  for (int m = 1; m <= 3; ++m) {
    for (int n : {3, 5, 8}) {
      auto W = random_linearization(n, m, seed, trial++);
      for (auto solver : {SpectrumSolver::svd, SpectrumSolver::hermitian}) {
        const auto sp = singular_spectrum(shift(W, {0.4, -0.2}), WeightMode::blocks, solver);
        for (const Complex& w : ws) {
          const auto tr = partial_traces(sp, w);
          Complex avg = 0.0;
          for (const auto& x : tr) avg += x;
          avg /= static_cast<double>(tr.size());
          const Complex mn = empirical_stieltjes(sp, w);
          t.add(std::abs(avg - mn) / (1e-10 * std::max(1.0, std::abs(mn))));
          for (const auto& x : tr) t.add(x.imag() > 0.0 ? 0.0 : 2.0);
        }
        for (Eigen::Index k = 0; k < sp.size(); ++k) {
          t.add(std::abs(sp.w_plus.col(k).sum() - 1.0) / 1e-10);
          t.add(std::abs(sp.w_minus.col(k).sum() - 1.0) / 1e-10);
        }
      }
    }
  }
  return t.r;
}

InvariantResult esd_symmetry(std::uint64_t seed) {
  Tally t("F_n(-x) + F_n(x-) = 1");
  auto W = random_linearization(16, 2, seed, 600);
  const auto sp = singular_spectrum(shift(W, {0.3, 0.0}));
  for (int i = -40; i <= 40; ++i) {
    const double x = 0.1 * i;
    t.add(esd_cdf(sp, -x) + esd_cdf_left(sp, x) == 1.0 ? 0.0 : 2.0);
  }
  for (Eigen::Index k = 0; k < sp.size(); ++k) {
    const double x = sp.values[k];
    t.add(esd_cdf(sp, -x) + esd_cdf_left(sp, x) == 1.0 ? 0.0 : 2.0);
  }
  return t.r;
}

InvariantResult cubic_fixed_point() {
  Tally t("self-consistency residual vanishes at m = s");
  const Complex zs[] = {{0.0, 0.0}, {0.5, 0.0}, {2.0, 0.0}, {0.5, 0.5}, {-1.3, 0.4}};
  const Complex ws[] = {{0.0, 0.1}, {1.0, 0.01}, {-0.5, 2.0}, {3.0, 0.5}};
  for (const Complex& z : zs) {
    for (const Complex& w : ws) {
      const Complex s = solve_s(z, w).s;
      for (int m = 1; m <= 3; ++m) {
        const std::vector<Complex> traces(2 * m, s);
        for (const Complex& v : selfconsistency_from_traces(traces, m, z, w).T) {
          t.add(std::abs(v) / 1e-10);
        }
      }
    }
  }
  return t.r;
}

}  // namespace

std::vector<InvariantResult> run_invariant_suite(std::uint64_t seed) {
  return {hermitization_identity(seed), power_identity(seed),      resolvent_checks(seed, true),
          resolvent_checks(seed, false), descent_checks(seed),      partial_trace_identity(seed),
          esd_symmetry(seed),            cubic_fixed_point()};
}

}  // namespace circlaw
