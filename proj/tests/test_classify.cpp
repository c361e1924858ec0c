#include "graspdec/classify.hpp"

#include "graspdec/riemann.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace graspdec;
using namespace graspdec::testutil;

namespace {

constexpr std::pair<Label, Label> kPair{Label::TG, Label::PG};

// Two Gaussian clouds in dimension `dim` whose centres are `separation`
// standard deviations apart.
void make_clouds(Rng& rng, int dim, int per_class, double separation, Mat& x,
                 std::vector<int>& y) {
  x.resize(dim, 2 * per_class);
  y.clear();
  for (int i = 0; i < 2 * per_class; ++i) {
    const int label = i < per_class ? 1 : -1;
    for (int d = 0; d < dim; ++d) {
      x(d, i) = rng.normal() + (d == 0 ? label * separation / 2.0 : 0.0);
    }
    y.push_back(label);
  }
}

double train_accuracy(const TrainedModel& model, const Mat& x, const std::vector<int>& y) {
  int correct = 0;
  for (int i = 0; i < x.cols(); ++i) {
    const auto [label, score] = predict(model, x.col(i));
    const int pred = label == model.pair.first ? 1 : -1;
    if (pred == y[i]) ++correct;
  }
  return static_cast<double>(correct) / x.cols();
}

ModelSpec spec_for(ModelKind kind, std::uint64_t seed = 7) {
  ModelSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("well-separated clouds train to 100 percent for every kind") {
  Rng rng(100);
  Mat x;
  std::vector<int> y;
  make_clouds(rng, 4, 40, 20.0, x, y);
  for (ModelKind kind :
       {ModelKind::lda, ModelKind::svm_linear, ModelKind::svm_rbf, ModelKind::mlp,
        ModelKind::ts_svm}) {
    const TrainedModel model = train_vector(spec_for(kind), x, y, kPair);
    CHECK(train_accuracy(model, x, y) == doctest::Approx(1.0));
  }
}

TEST_CASE("XOR geometry separates RBF from linear") {
  // the four XOR points, slightly thickened so each class has 4 samples
  Mat x(2, 8);
  x << 0, 1, 0.05, 0.95, 0, 1, 0.05, 0.95,
       0, 1, 0.05, 0.95, 1, 0, 0.95, 0.05;
  const std::vector<int> y = {1, 1, 1, 1, -1, -1, -1, -1};

  ModelSpec rbf = spec_for(ModelKind::svm_rbf);
  rbf.gamma = 2.0;
  rbf.cost = 100.0;
  const TrainedModel rbf_model = train_vector(rbf, x, y, kPair);
  CHECK(train_accuracy(rbf_model, x, y) == doctest::Approx(1.0));

  ModelSpec lin = spec_for(ModelKind::svm_linear);
  lin.cost = 100.0;
  const TrainedModel lin_model = train_vector(lin, x, y, kPair);
  CHECK(train_accuracy(lin_model, x, y) <= 0.75);
}

TEST_CASE("single-class input is rejected") {
  Mat x = Mat::Random(3, 10);
  const std::vector<int> y(10, 1);
  for (ModelKind kind : {ModelKind::lda, ModelKind::svm_rbf, ModelKind::mlp}) {
    try {
      train_vector(spec_for(kind), x, y, kPair);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == Error::Code::single_class);
    }
  }
}

TEST_CASE("non-finite features are rejected") {
  Mat x = Mat::Random(3, 10);
  x(1, 4) = std::numeric_limits<double>::infinity();
  std::vector<int> y(10, 1);
  y[5] = -1;
  try {
    train_vector(spec_for(ModelKind::lda), x, y, kPair);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Error::Code::non_finite_sample);
  }
}

TEST_CASE("SMO satisfies the KKT conditions") {
  Rng rng(200);
  for (int rep = 0; rep < 20; ++rep) {
    Mat x;
    std::vector<int> y;
    // alternate separable and heavily overlapping sets
    const double sep = rep % 2 == 0 ? 6.0 : 0.5;
    make_clouds(rng, 3, 15 + rng.index(10), sep, x, y);
    ModelSpec spec = spec_for(rep % 3 == 0 ? ModelKind::svm_linear : ModelKind::svm_rbf);
    spec.tolerance = 1e-3;
    const TrainedModel model = train_vector(spec, x, y, kPair);

    // Reconstruct alpha per training point: support vectors store alpha*y.
    for (int i = 0; i < x.cols(); ++i) {
      double alpha = 0.0;
      for (int s = 0; s < model.support_vectors.cols(); ++s) {
        if ((model.support_vectors.col(s) - x.col(i)).norm() == 0.0) {
          alpha = std::abs(model.dual_coefs[s]);
          break;
        }
      }
      const double f = predict(model, x.col(i)).second;
      const double margin = y[i] * f;
      if (alpha < 1e-9) {
        CHECK(margin >= 1.0 - spec.tolerance - 1e-9);
      } else if (alpha > spec.cost - 1e-9) {
        CHECK(margin <= 1.0 + spec.tolerance + 1e-9);
      } else {
        CHECK(margin == doctest::Approx(1.0).epsilon(spec.tolerance));
      }
    }
  }
}

TEST_CASE("SVM score vanishes on the decision hyperplane") {
  // two symmetric points: the separating hyperplane passes through the origin
  Mat x(2, 2);
  x << 1.0, -1.0, 0.5, -0.5;
  const std::vector<int> y = {1, -1};
  const TrainedModel model = train_vector(spec_for(ModelKind::svm_linear), x, y, kPair);
  Vec mid(2);
  mid << 0.0, 0.0;
  CHECK(std::abs(predict(model, mid).second) < 1e-9);
}

TEST_CASE("LDA matches the closed form for shared covariance") {
  Rng rng(300);
  // identical spherical class covariances, means at +-m: boundary at the
  // midpoint hyperplane, weights along the mean difference
  Vec m(3);
  m << 1.0, -2.0, 0.5;
  Mat x(3, 400);
  std::vector<int> y;
  for (int i = 0; i < 400; ++i) {
    const int label = i < 200 ? 1 : -1;
    for (int d = 0; d < 3; ++d) x(d, i) = rng.normal() + label * m[d];
    y.push_back(label);
  }
  const TrainedModel model = train_vector(spec_for(ModelKind::lda), x, y, kPair);
  // midpoint of the class means scores zero
  Vec mean_pos = Vec::Zero(3), mean_neg = Vec::Zero(3);
  for (int i = 0; i < 200; ++i) mean_pos += x.col(i);
  for (int i = 200; i < 400; ++i) mean_neg += x.col(i);
  mean_pos /= 200.0;
  mean_neg /= 200.0;
  const Vec midpoint = 0.5 * (mean_pos + mean_neg);
  CHECK(std::abs(predict(model, midpoint).second) < 1e-9);
  // and the weight vector aligns with the empirical closed-form solution
  Mat pooled = Mat::Zero(3, 3);
  for (int i = 0; i < 400; ++i) {
    const Vec d = x.col(i) - (y[i] == 1 ? mean_pos : mean_neg);
    pooled += d * d.transpose();
  }
  pooled /= 398.0;
  const Vec w_oracle = pooled.inverse() * (mean_pos - mean_neg);
  const double cosine = w_oracle.dot(model.lda_weights) /
                        (w_oracle.norm() * model.lda_weights.norm());
  CHECK(cosine == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("LDA predictions are invariant to common affine maps") {
  Rng rng(301);
  Mat x;
  std::vector<int> y;
  make_clouds(rng, 4, 50, 2.0, x, y);
  Mat test(4, 40);
  for (int i = 0; i < test.size(); ++i) test(i / 40, i % 40) = rng.normal();

  const TrainedModel base = train_vector(spec_for(ModelKind::lda), x, y, kPair);

  Mat g(4, 4);
  for (int i = 0; i < 16; ++i) g(i / 4, i % 4) = rng.normal();
  g += 4.0 * Mat::Identity(4, 4);  // comfortably invertible
  Vec shift(4);
  for (int i = 0; i < 4; ++i) shift[i] = rng.normal();

  Mat x_t = g * x;
  x_t.colwise() += shift;
  const TrainedModel mapped = train_vector(spec_for(ModelKind::lda), x_t, y, kPair);

  for (int i = 0; i < test.cols(); ++i) {
    const Vec t = g * test.col(i) + shift;
    CHECK(predict(base, test.col(i)).first == predict(mapped, t).first);
  }
}

TEST_CASE("MLP analytic gradient matches central differences") {
  Rng rng(400);
  const int f = 5, h = 15, n = 12;
  Mat x(f, n);
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < f; ++d) x(d, i) = rng.normal();
    y.push_back(i % 2 == 0 ? 1 : -1);
  }
  const int n_params = h * f + h + h + 1;
  for (int rep = 0; rep < 10; ++rep) {
    Vec params(n_params);
    for (int i = 0; i < n_params; ++i) params[i] = rng.uniform(-0.5, 0.5);
    Vec grad;
    mlp_loss_grad(params, x, y, h, &grad);
    // probe a handful of coordinates with central differences
    for (int probe = 0; probe < 8; ++probe) {
      const int idx = rng.index(n_params);
      const double eps = 1e-6;
      Vec p1 = params, p2 = params;
      p1[idx] += eps;
      p2[idx] -= eps;
      const double numeric =
          (mlp_loss_grad(p1, x, y, h, nullptr) - mlp_loss_grad(p2, x, y, h, nullptr)) /
          (2.0 * eps);
      const double denom = std::max({std::abs(numeric), std::abs(grad[idx]), 1e-8});
      CHECK(std::abs(numeric - grad[idx]) / denom < 1e-5);
    }
  }
}

TEST_CASE("MLP training is deterministic given the seed") {
  Rng rng(401);
  Mat x;
  std::vector<int> y;
  make_clouds(rng, 3, 30, 3.0, x, y);
  const TrainedModel a = train_vector(spec_for(ModelKind::mlp, 5), x, y, kPair);
  const TrainedModel b = train_vector(spec_for(ModelKind::mlp, 5), x, y, kPair);
  const TrainedModel c = train_vector(spec_for(ModelKind::mlp, 6), x, y, kPair);
  CHECK((a.hidden_weights - b.hidden_weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.output_weights - b.output_weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.hidden_weights - c.hidden_weights).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("MDM classifies planted covariance clusters") {
  Rng rng(500);
  auto planted = [&](double scale) {
    Mat base = Mat::Identity(4, 4) * scale;
    Mat jitter = random_spd(rng, 4, 0.9, 1.1);
    Mat out = 0.5 * (base + jitter * scale * 0.2);
    return Mat(0.5 * (out + out.transpose()));
  };
  std::vector<Mat> covs;
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) {
    covs.push_back(planted(i < 10 ? 1.0 : 8.0));
    y.push_back(i < 10 ? 1 : -1);
  }
  const TrainedModel model = train_mdm(covs, y, kPair);

  SUBCASE("planted clusters separate perfectly") {
    int correct = 0;
    for (std::size_t i = 0; i < covs.size(); ++i) {
      const auto [label, score] = predict_cov(model, covs[i]);
      if ((label == kPair.first ? 1 : -1) == y[i]) ++correct;
    }
    CHECK(correct == 20);
  }

  SUBCASE("a class mean maps to its own class with positive margin") {
    const auto [label, score] = predict_cov(model, model.mean_first);
    CHECK(label == kPair.first);
    CHECK(score > 0.0);
  }

  SUBCASE("score is the distance difference") {
    const Mat probe = planted(2.0);
    const auto [label, score] = predict_cov(model, probe);
    const double d1 = logeuclid_distance(probe, model.mean_first);
    const double d2 = logeuclid_distance(probe, model.mean_second);
    CHECK(score == doctest::Approx(d2 - d1).epsilon(1e-12));
  }

  SUBCASE("equidistant covariance resolves to the first class") {
    // symmetric construction: both classes see the same matrices, so every
    // probe is exactly equidistant from the two means
    std::vector<Mat> same = {covs[0], covs[1], covs[0], covs[1]};
    const TrainedModel tied = train_mdm(same, {1, 1, -1, -1}, kPair);
    const auto [label, score] = predict_cov(tied, covs[2]);
    CHECK(score == 0.0);
    CHECK(label == kPair.first);
  }

  SUBCASE("swapping the labels swaps the predictions") {
    std::vector<int> y_swapped;
    for (int v : y) y_swapped.push_back(-v);
    const TrainedModel swapped = train_mdm(covs, y_swapped, {Label::PG, Label::TG});
    for (int rep = 0; rep < 10; ++rep) {
      const Mat probe = planted(rng.uniform(0.5, 10.0));
      CHECK(predict_cov(model, probe).first == predict_cov(swapped, probe).first);
    }
  }

  SUBCASE("single-class input is rejected") {
    CHECK_THROWS_AS(train_mdm(covs, std::vector<int>(20, 1), kPair), Error);
  }
}

TEST_CASE("rbf kernel") {
  Vec a(3), b(3);
  a << 1, 2, 3;
  b << 1, 2, 3;
  CHECK(rbf_kernel(a, b, 0.7) == doctest::Approx(1.0));

  b << 2, 2, 3;  // squared distance 1
  CHECK(rbf_kernel(a, b, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  SUBCASE("unit squared distance at 1/gamma gives exp(-1)") {
    Vec c(1), d(1);
    c << 0.0;
    const double gamma = 4.0;
    d << 1.0 / std::sqrt(gamma);
    CHECK(rbf_kernel(c, d, gamma) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  }

  SUBCASE("gram matrices are positive semidefinite") {
    Rng rng(600);
    const int n = 20;
    std::vector<Vec> pts;
    for (int i = 0; i < n; ++i) {
      Vec p(4);
      for (int d = 0; d < 4; ++d) p[d] = rng.normal();
      pts.push_back(p);
    }
    Mat gram(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) gram(i, j) = rbf_kernel(pts[i], pts[j], 0.5);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }

  SUBCASE("dimension mismatch and bad gamma are rejected") {
    Vec short_vec(2);
    short_vec << 1, 2;
    CHECK_THROWS_AS(rbf_kernel(a, short_vec, 1.0), Error);
    CHECK_THROWS_AS(rbf_kernel(a, b, 0.0), Error);
  }
}

TEST_CASE("predict validates dimensions") {
  Rng rng(700);
  Mat x;
  std::vector<int> y;
  make_clouds(rng, 3, 10, 5.0, x, y);
  const TrainedModel model = train_vector(spec_for(ModelKind::svm_rbf), x, y, kPair);
  Vec wrong(4);
  wrong.setZero();
  CHECK_THROWS_AS(predict(model, wrong), Error);
  CHECK_THROWS_AS(predict_cov(model, Mat::Identity(3, 3)), Error);
}
