// tests/test_mixture.cpp

// Copyright 2026  The sgpmix authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "sgpmix/experiment.hpp"
#include "sgpmix/fcm.hpp"
#include "sgpmix/metrics.hpp"
#include "sgpmix/mixture.hpp"
#include "test_support.hpp"

using namespace sgpmix;
using namespace sgpmix::testing;

namespace {

// Dense reimplementation of the integrated bound, sharing nothing with the
// Woodbury path: full Nystrom operator, full N x N covariance, direct
// per-entry correction terms.
double dense_kl_bound(const ModelState &s, const Matrix &r, const Matrix &y,
                      double jitter_base) {
  const double beta = s.beta();
  const Index n = s.n(), p = y.cols();
  double total = 0.0;
  for (Index m = 0; m < s.m_components(); ++m) {
    const KernelParams &params = s.kernels[static_cast<size_t>(m)];
    Matrix k_uu = gram(s.family, params, s.x_u, s.x_u, true).values;
    k_uu.diagonal().array() += jitter_base * k_uu.diagonal().mean();
    const Matrix k_fu = gram(s.family, params, s.x, s.x_u, false).values;
    Matrix cov = dense_nystrom(k_uu, k_fu);
    for (Index i = 0; i < n; ++i) cov(i, i) += 1.0 / (beta * r(i, m));
    for (Index i = 0; i < p; ++i)
      total += dense_gaussian_logpdf(y.col(i), cov);
  }
  // correction terms, written out directly
  const Vector pi = s.mixing_proportions();
  for (Index i = 0; i < n; ++i)
    for (Index m = 0; m < s.m_components(); ++m) {
      double log_gauss = 0.0;
      for (Index d = 0; d < s.q_dim(); ++d) {
        const double c = std::exp(s.log_cov_diag(m, d));
        const double diff = s.x(i, d) - s.means(m, d);
        log_gauss += -0.5 * (kLog2Pi + s.log_cov_diag(m, d) +
                             diff * diff / c);
      }
      const double rr = r(i, m);
      total += rr * log_gauss + rr * std::log(pi(m)) - rr * std::log(rr);
      total += static_cast<double>(p) *
               std::log(std::sqrt(std::pow(beta / (2.0 * kPi), rr) /
                                  (rr * beta / (2.0 * kPi))));
    }
  return total;
}

}  // namespace

TEST_CASE("init_model") {
  SUBCASE("beta follows the variance rule") {
    std::mt19937_64 rng(61);
    Matrix y = standardize_columns(random_matrix(24, 3, rng)) * 2.0;
    Dataset d;
    d.y = y;  // every column variance exactly 4
    const ModelState s = init_model(d, 3, 2, 8, 0, KernelFamily::kRbf);
    CHECK(s.beta() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("uniform mixing proportions and unit latent covariances") {
    const Dataset d = make_two_blobs(15, 0.3, 3);
    const ModelState s = init_model(d, 3, 2, 10, 1, KernelFamily::kRbf);
    const Vector pi = s.mixing_proportions();
    for (Index m = 0; m < 3; ++m)
      CHECK(pi(m) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(s.log_cov_diag.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.kernels[0].bias() == doctest::Approx(std::exp(-2.0)));
    CHECK(s.kernels[0].white() == doctest::Approx(std::exp(-2.0)));
  }
  SUBCASE("inducing draw with n_prime = N is a permutation of X") {
    const Dataset d = make_two_blobs(10, 0.3, 4);
    const ModelState s = init_model(d, 2, 2, d.n(), 7, KernelFamily::kRbf);
    std::multiset<double> xs, us;
    for (Index i = 0; i < s.n(); ++i) {
      xs.insert(s.x(i, 0));
      us.insert(s.x_u(i, 0));
    }
    CHECK(xs == us);
  }
  SUBCASE("degenerate data is rejected") {
    Dataset d;
    d.y = Matrix::Ones(10, 2);
    CHECK_THROWS_AS(init_model(d, 2, 1, 5, 0, KernelFamily::kRbf),
                    std::invalid_argument);
  }
}

TEST_CASE("estep_qf") {
  SUBCASE("single component with unit responsibilities is one sparse GP") {
    MixtureInstance inst = random_mixture_instance(10, 4, 1, 2, 3, 71);
    inst.resp.r = Matrix::Ones(10, 1);
    const auto posts = estep_qf(inst.state, inst.resp, inst.y);
    REQUIRE(posts.size() == 1);
    const DtcFactor f = build_dtc(inst.state.family, inst.state.kernels[0],
                                  inst.state.x, inst.state.x_u, 1e-6);
    const ComponentPosterior direct =
        posterior_qf(f, {inst.state.beta() * Vector::Ones(10)}, inst.y);
    CHECK((posts[0].f_mean - direct.f_mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((posts[0].sigma_diag - direct.sigma_diag).cwiseAbs().maxCoeff() <
          1e-12);
  }
  SUBCASE("identical components and responsibilities match exactly") {
    MixtureInstance inst = random_mixture_instance(8, 3, 2, 2, 2, 72);
    inst.state.kernels[1] = inst.state.kernels[0];
    inst.resp.r = Matrix::Constant(8, 2, 0.5);
    const auto posts = estep_qf(inst.state, inst.resp, inst.y);
    CHECK((posts[0].f_mean - posts[1].f_mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK((posts[0].sigma_diag - posts[1].sigma_diag).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("estep_qs") {
  SUBCASE("one component gets everything") {
    const MixtureInstance inst = random_mixture_instance(9, 3, 1, 2, 2, 73);
    const auto posts = estep_qf(inst.state, inst.resp, inst.y);
    const Responsibilities r = estep_qs(inst.state, posts, inst.y);
    CHECK((r.r.array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("symmetric components split evenly") {
    MixtureInstance inst = random_mixture_instance(7, 3, 2, 2, 2, 74);
    inst.state.kernels[1] = inst.state.kernels[0];
    inst.state.log_pi.setZero();
    inst.state.means.row(1) = inst.state.means.row(0);
    inst.state.log_cov_diag.row(1) = inst.state.log_cov_diag.row(0);
    inst.resp.r = Matrix::Constant(7, 2, 0.5);
    const auto posts = estep_qf(inst.state, inst.resp, inst.y);
    const Responsibilities r = estep_qs(inst.state, posts, inst.y);
    CHECK((r.r.array() - 0.5).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("matches a direct long-double evaluation") {
    const MixtureInstance inst = random_mixture_instance(2, 2, 2, 2, 2, 75);
    const auto posts = estep_qf(inst.state, inst.resp, inst.y);
    const Responsibilities got = estep_qs(inst.state, posts, inst.y);

    const ModelState &s = inst.state;
    const long double beta = std::exp((long double)s.log_beta);
    const Vector pi = s.mixing_proportions();
    for (Index i = 0; i < 2; ++i) {
      long double p[2];
      for (Index m = 0; m < 2; ++m) {
        long double log_gauss = 0.0L;
        for (Index d = 0; d < s.q_dim(); ++d) {
          const long double c = std::exp((long double)s.log_cov_diag(m, d));
          const long double diff = s.x(i, d) - s.means(m, d);
          log_gauss += -0.5L * (std::log(2.0L * (long double)kPi) +
                                (long double)s.log_cov_diag(m, d) +
                                diff * diff / c);
        }
        long double ell = 0.0L;
        for (Index c = 0; c < inst.y.cols(); ++c) {
          const long double fm = posts[static_cast<size_t>(m)].f_mean(i, c);
          const long double sg = posts[static_cast<size_t>(m)].sigma_diag(i);
          const long double resid = (long double)inst.y(i, c) - fm;
          ell += 0.5L * std::log(beta / (2.0L * (long double)kPi)) -
                 0.5L * beta * (resid * resid + sg);
        }
        p[m] = (long double)pi(m) * std::exp(log_gauss) * std::exp(ell);
      }
      const long double total = p[0] + p[1];
      CHECK(std::abs((double)(p[0] / total) - got.r(i, 0)) < 1e-13);
      CHECK(std::abs((double)(p[1] / total) - got.r(i, 1)) < 1e-13);
    }
  }
  SUBCASE("rows stay stochastic after flooring") {
    const MixtureInstance inst = random_mixture_instance(20, 5, 3, 2, 3, 76);
    const auto posts = estep_qf(inst.state, inst.resp, inst.y);
    const Responsibilities r = estep_qs(inst.state, posts, inst.y);
    CHECK((r.r.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(r.r.minCoeff() >= kResponsibilityFloor * 0.99);
  }
}

TEST_CASE("c_terms") {
  SUBCASE("unit responsibility kills the beta correction") {
    MixtureInstance inst = random_mixture_instance(5, 2, 1, 2, 4, 81);
    inst.resp.r = Matrix::Ones(5, 1);
    // single component: log pi = 0, -r log r = 0, beta term = 0, so what is
    // left is exactly the latent-prior log density
    inst.state.means.setZero();
    inst.state.log_cov_diag.setZero();
    inst.state.x.setZero();
    const Matrix c = c_terms(inst.state, inst.resp, 4);
    for (Index i = 0; i < 5; ++i)
      CHECK(c(i, 0) ==
            doctest::Approx(-0.5 * inst.state.q_dim() * kLog2Pi)
                .epsilon(1e-12));
  }
  SUBCASE("floored responsibilities cancel against the Gaussian term") {
    // The -P/2 log r piece of c and the +P/2 log b piece of the Gaussian
    // log-marginal cancel; the total bound must converge as r drops to the
    // floor instead of diverging like log r.
    MixtureInstance inst = random_mixture_instance(3, 2, 2, 2, 2, 82);
    auto bound_at = [&](double eps) {
      Matrix r(3, 2);
      r.col(0).setConstant(eps);
      r.col(1).setConstant(1.0 - eps);
      return kl_bound(inst.state, {r}, inst.y).kl_corrected;
    };
    const double b8 = bound_at(1e-8);
    const double b10 = bound_at(1e-10);
    const double b12 = bound_at(1e-12);
    CHECK(std::isfinite(b8));
    CHECK(std::isfinite(b12));
    CHECK(std::abs(b10 - b12) < std::abs(b8 - b10) + 1e-9);
    CHECK(std::abs(b10 - b12) < 1e-4);
  }
}

TEST_CASE("kl_bound matches the dense reimplementation") {
  for (std::uint64_t seed : {91, 92, 93}) {
    const MixtureInstance inst = random_mixture_instance(3, 2, 2, 2, 2, seed);
    const BoundReport got = kl_bound(inst.state, inst.resp, inst.y);
    const double want =
        dense_kl_bound(inst.state, inst.resp.r, inst.y, 1e-6);
    CHECK(std::abs(got.kl_corrected - want) < 1e-8);
    CHECK(got.kl_corrected ==
          doctest::Approx(got.gaussian_term + got.c_term).epsilon(1e-15));
  }
  SUBCASE("larger instance") {
    const MixtureInstance inst = random_mixture_instance(14, 5, 3, 2, 4, 94);
    const BoundReport got = kl_bound(inst.state, inst.resp, inst.y);
    const double want =
        dense_kl_bound(inst.state, inst.resp.r, inst.y, 1e-6);
    CHECK(std::abs(got.kl_corrected - want) < 1e-8);
  }
}

TEST_CASE("standard bound against the integrated bound") {
  SUBCASE("equal at the exact posterior, below it after perturbation") {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 5; ++rep) {
      const MixtureInstance inst = random_mixture_instance(
          6 + static_cast<Index>(rng() % 6), 3, 2, 2, 3, rng());
      auto posts = estep_qf(inst.state, inst.resp, inst.y);
      const double kl = kl_bound(inst.state, inst.resp, inst.y).kl_corrected;
      const double sv = standard_bound(inst.state, inst.resp, posts, inst.y);
      CHECK(std::abs(kl - sv) < 1e-8);

      auto perturbed = posts;
      perturbed[0].w_mean.array() += 0.25;
      perturbed[1].w_mean.array() -= 0.1;
      const double sv_p =
          standard_bound(inst.state, inst.resp, perturbed, inst.y);
      CHECK(kl >= sv_p - 1e-8);
      CHECK(sv_p < sv - 1e-6);  // strictly worse after the perturbation
    }
  }
  SUBCASE("perturbing covariance also lowers the standard bound") {
    const MixtureInstance inst = random_mixture_instance(8, 3, 2, 2, 2, 103);
    auto posts = estep_qf(inst.state, inst.resp, inst.y);
    auto perturbed = posts;
    perturbed[0].w_cov *= 1.5;
    const double kl = kl_bound(inst.state, inst.resp, inst.y).kl_corrected;
    const double sv_p =
        standard_bound(inst.state, inst.resp, perturbed, inst.y);
    CHECK(kl >= sv_p - 1e-8);
  }
}

TEST_CASE("kl_bound_grads") {
  SUBCASE("finite differences across every block, rbf") {
    const GradcheckReport report =
        run_gradcheck(15, 4, 2, 2, 3, 0, KernelFamily::kRbf, false);
    for (const auto &b : report.blocks) {
      INFO(b.name, " err=", b.max_rel_err);
      CHECK(b.max_rel_err < 1e-4);
    }
    CHECK(report.pass);
  }
  SUBCASE("finite differences across every block, linear") {
    const GradcheckReport report =
        run_gradcheck(12, 4, 2, 2, 3, 1, KernelFamily::kLinear, false);
    for (const auto &b : report.blocks) {
      INFO(b.name, " err=", b.max_rel_err);
      CHECK(b.max_rel_err < 1e-4);
    }
    CHECK(report.pass);
  }
  SUBCASE("negative control trips the check") {
    const GradcheckReport report =
        run_gradcheck(10, 3, 2, 2, 2, 2, KernelFamily::kRbf, true);
    CHECK(!report.pass);
  }
  SUBCASE("mixing-proportion gradient lives in the softmax tangent space") {
    const MixtureInstance inst = random_mixture_instance(10, 4, 3, 2, 3, 105);
    const Vector g = kl_bound_grads(inst.state, inst.resp, inst.y);
    double pi_sum = 0.0;
    for (const auto &block : inst.state.param_blocks())
      if (block.name == "log_pi")
        for (Index i = block.begin; i < block.end; ++i) pi_sum += g(i);
    CHECK(std::abs(pi_sum) < 1e-10);
  }
  SUBCASE("rbf bound is invariant to joint translation") {
    const MixtureInstance inst = random_mixture_instance(9, 3, 2, 2, 2, 106);
    const Vector g = kl_bound_grads(inst.state, inst.resp, inst.y);
    const auto blocks = inst.state.param_blocks();
    const Index q = inst.state.q_dim();
    for (Index d = 0; d < q; ++d) {
      double sum = 0.0;
      for (const auto &block : blocks) {
        if (block.name != "x" && block.name != "x_u" && block.name != "means")
          continue;
        for (Index i = block.begin + d; i < block.end; i += q) sum += g(i);
      }
      CHECK(std::abs(sum) < 1e-8);
    }
    // value check as well
    ModelState shifted = inst.state;
    shifted.x.array() += 0.37;
    shifted.x_u.array() += 0.37;
    shifted.means.array() += 0.37;
    const double a = kl_bound(inst.state, inst.resp, inst.y).kl_corrected;
    const double b = kl_bound(shifted, inst.resp, inst.y).kl_corrected;
    CHECK(std::abs(a - b) < 1e-6 * std::max(1.0, std::abs(a)));
  }
  SUBCASE("latent-prior terms are translation invariant on their own") {
    MixtureInstance inst = random_mixture_instance(7, 3, 2, 2, 3, 107);
    const Matrix c0 = c_terms(inst.state, inst.resp, 3);
    inst.state.x.array() += 1.3;
    inst.state.means.array() += 1.3;
    const Matrix c1 = c_terms(inst.state, inst.resp, 3);
    CHECK(std::abs(c0.sum() - c1.sum()) < 1e-10);
  }
}

TEST_CASE("assign_clusters") {
  Responsibilities r;
  r.r.resize(2, 2);
  r.r << 0.2, 0.8, 0.5, 0.5;
  const auto got = assign_clusters(r);
  CHECK(got[0] == 1);
  CHECK(got[1] == 0);  // tie goes to the lower index
  SUBCASE("random rows agree with a brute-force argmax") {
    std::mt19937_64 rng(111);
    Responsibilities rr;
    rr.r = random_matrix(30, 4, rng, 0.0, 1.0);
    const auto fast = assign_clusters(rr);
    for (Index i = 0; i < 30; ++i) {
      int best = 0;
      for (Index m = 1; m < 4; ++m)
        if (rr.r(i, m) > rr.r(i, best)) best = static_cast<int>(m);
      CHECK(fast[static_cast<size_t>(i)] == best);
    }
  }
}

TEST_CASE("em_fit separates two blobs perfectly") {
  const Dataset blobs = make_two_blobs(20, 0.1, 13);
  FitOptions opts;
  opts.mstep_iters = 10;
  const FitResult fit =
      em_fit(blobs, 2, 2, 10, 15, 1, KernelFamily::kRbf, opts);
  const LabelPair pair{*blobs.labels, assign_clusters(fit.resp)};
  CHECK(clustering_accuracy(pair) == doctest::Approx(100.0));
  // fuzzy c-means on the raw data solves this too; the mixture must not do
  // worse on a separable toy
  const FcmResult fcm = fcm_cluster(blobs.y, 2, 2.0, 300, 1e-8, 1);
  std::vector<int> fcm_clusters;
  for (Index i = 0; i < blobs.n(); ++i) {
    Index arg = 0;
    fcm.memberships.row(i).maxCoeff(&arg);
    fcm_clusters.push_back(static_cast<int>(arg));
  }
  CHECK(clustering_accuracy({*blobs.labels, fcm_clusters}) ==
        doctest::Approx(100.0));
  SUBCASE("trace length and finiteness") {
    CHECK(fit.report.per_iteration_trace.size() == 15);
    for (const auto &tp : fit.report.per_iteration_trace)
      CHECK(std::isfinite(tp.kl_corrected));
    CHECK(fit.report.per_iteration_trace.back().accuracy.has_value());
  }
}

TEST_CASE("m-step never decreases the bound within itself") {
  const Dataset blobs = make_two_blobs(12, 0.2, 17);
  FitOptions opts;
  opts.mstep_iters = 12;
  opts.record_mstep_traces = true;
  const FitResult fit = em_fit(blobs, 2, 2, 8, 6, 2, KernelFamily::kRbf, opts);
  REQUIRE(fit.report.mstep_value_traces.size() == 6);
  for (const auto &trace : fit.report.mstep_value_traces)
    for (std::size_t i = 1; i < trace.size(); ++i)
      CHECK(trace[i] <= trace[i - 1] + 1e-9);
}

TEST_CASE("permuting components permutes the responsibilities") {
  const Dataset blobs = make_two_blobs(12, 0.3, 19);
  const Matrix y = standardize_columns(blobs.y);
  ModelState state = init_model({y, blobs.labels, "blobs"}, 2, 2, 8, 3,
                                KernelFamily::kRbf);
  ModelState swapped = state;
  std::swap(swapped.kernels[0], swapped.kernels[1]);
  swapped.log_pi.reverseInPlace();
  swapped.means = state.means.colwise().reverse().eval();
  swapped.log_cov_diag = state.log_cov_diag.colwise().reverse().eval();

  const Responsibilities r0{Matrix::Constant(y.rows(), 2, 0.5)};
  FitOptions opts;
  opts.mstep_iters = 5;
  const FitResult a = em_fit_from(state, r0, y, blobs.labels, 2, opts);
  const FitResult b = em_fit_from(swapped, r0, y, blobs.labels, 2, opts);
  CHECK((a.resp.r.col(0) - b.resp.r.col(1)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((a.resp.r.col(1) - b.resp.r.col(0)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("bound and gradient evaluate at scale without dense blowup") {
  // N large enough that any N x N intermediate would be ~40 MB and clearly
  // out of line with the O(N N'^2) contract; completes in well under a
  // minute if no such matrix is formed.
  const MixtureInstance inst = random_mixture_instance(2310, 100, 2, 2, 4,
                                                       121);
  const BoundReport report = kl_bound(inst.state, inst.resp, inst.y);
  CHECK(std::isfinite(report.kl_corrected));
  const Vector g = kl_bound_grads(inst.state, inst.resp, inst.y);
  CHECK(g.allFinite());
  CHECK(g.size() == inst.state.num_free_params());
}
