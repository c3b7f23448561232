#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "distill.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace doclab;
using testutil::Rng;

namespace {

FeatureBatch random_batch(Rng& rng, int rows, int cols, double scale = 1.0) {
  FeatureBatch m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-scale, scale);
  return m;
}

LinearProjection random_projection(Rng& rng, int d, int p, double scale = 1.0) {
  LinearProjection proj;
  proj.weight = random_batch(rng, d, p, scale);
  proj.bias = Eigen::VectorXd(d);
  for (int i = 0; i < d; ++i) proj.bias(i) = rng.uniform(-scale, scale);
  return proj;
}

double max_rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  double worst = 0;
  for (int r = 0; r < got.rows(); ++r)
    for (int c = 0; c < got.cols(); ++c) {
      const double scale = std::max(1.0, std::abs(want(r, c)));
      worst = std::max(worst, std::abs(got(r, c) - want(r, c)) / scale);
    }
  return worst;
}

}  // namespace

TEST_CASE("a perfect projection has zero loss") {
  Rng rng(11);
  const auto student = random_batch(rng, 8, 4);
  const auto proj = random_projection(rng, 6, 4);
  FeatureBatch teacher = student * proj.weight.transpose();
  teacher.rowwise() += proj.bias.transpose();
  CHECK(distill_loss(teacher, student, proj) == doctest::Approx(0.0).epsilon(1e-12));
  const auto grad = distill_grad(teacher, student, proj);
  CHECK(grad.weight.norm() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(grad.bias.norm() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("the scalar case matches hand arithmetic") {
  // one sample, one dimension: s = 1, t = 1, W = 0, b = 0
  FeatureBatch teacher(1, 1), student(1, 1);
  teacher(0, 0) = 1.0;
  student(0, 0) = 1.0;
  LinearProjection proj;
  proj.weight = Eigen::MatrixXd::Zero(1, 1);
  proj.bias = Eigen::VectorXd::Zero(1);
  // residual is -1, loss = 1, dW = 2*(-1)*1 = -2, db = -2
  CHECK(distill_loss(teacher, student, proj) == doctest::Approx(1.0).epsilon(1e-15));
  const auto grad = distill_grad(teacher, student, proj);
  CHECK(grad.weight(0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(grad.bias(0) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("the loss agrees with a naive triple loop") {
  Rng rng(12);
  for (int round = 0; round < 20; ++round) {
    const int b = int(rng.integer(1, 12));
    const int p = int(rng.integer(1, 6));
    const int d = int(rng.integer(1, 6));
    const auto student = random_batch(rng, b, p);
    const auto teacher = random_batch(rng, b, d);
    const auto proj = random_projection(rng, d, p);
    const double naive = oracle::distill_loss_naive(teacher, student, proj.weight, proj.bias);
    CHECK(distill_loss(teacher, student, proj) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradients track central finite differences") {
  Rng rng(13);
  for (int round = 0; round < 50; ++round) {
    const int b = int(rng.integer(1, 32));
    const int p = int(rng.integer(1, 16));
    const int d = int(rng.integer(1, 16));
    const auto student = random_batch(rng, b, p);
    const auto teacher = random_batch(rng, b, d);
    const auto proj = random_projection(rng, d, p);
    const auto grad = distill_grad(teacher, student, proj);
    Eigen::MatrixXd fd_weight;
    Eigen::VectorXd fd_bias;
    oracle::finite_difference_grad(teacher, student, proj.weight, proj.bias, 1e-6, fd_weight,
                                   fd_bias);
    CHECK(max_rel_err(grad.weight, fd_weight) < 1e-4);
    CHECK(max_rel_err(grad.bias, fd_bias) < 1e-4);
  }
}

TEST_CASE("loss and gradient are invariant to sample order") {
  Rng rng(14);
  const auto student = random_batch(rng, 10, 5);
  const auto teacher = random_batch(rng, 10, 7);
  const auto proj = random_projection(rng, 7, 5);
  FeatureBatch student_rev(10, 5), teacher_rev(10, 7);
  for (int r = 0; r < 10; ++r) {
    student_rev.row(r) = student.row(9 - r);
    teacher_rev.row(r) = teacher.row(9 - r);
  }
  CHECK(distill_loss(teacher, student, proj) ==
        doctest::Approx(distill_loss(teacher_rev, student_rev, proj)).epsilon(1e-12));
  const auto g1 = distill_grad(teacher, student, proj);
  const auto g2 = distill_grad(teacher_rev, student_rev, proj);
  CHECK((g1.weight - g2.weight).norm() < 1e-10);
  CHECK((g1.bias - g2.bias).norm() < 1e-10);
}

TEST_CASE("shape errors are reported as such") {
  Rng rng(15);
  const auto student = random_batch(rng, 4, 3);
  const auto teacher = random_batch(rng, 5, 2);  // row count differs
  const auto proj = random_projection(rng, 2, 3);
  try {
    distill_loss(teacher, student, proj);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::shape_mismatch);
  }
  const auto teacher_ok = random_batch(rng, 4, 2);
  const auto proj_bad = random_projection(rng, 2, 4);  // wrong input width
  try {
    distill_loss(teacher_ok, student, proj_bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::shape_mismatch);
  }
  try {
    distill_loss(FeatureBatch(0, 2), FeatureBatch(0, 3), proj);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
}

TEST_CASE("gradient descent drives a realizable instance to near-zero loss") {
  Rng rng(16);
  const auto student = random_batch(rng, 24, 4);
  const auto truth = random_projection(rng, 5, 4);
  FeatureBatch teacher = student * truth.weight.transpose();
  teacher.rowwise() += truth.bias.transpose();
  const double lr = descent_learning_rate_bound(student);
  const auto fit = fit_projection_gd(teacher, student, lr, 4000, 99);
  CHECK(fit.loss_trace.back() < 1e-8);
  CHECK(fit.loss_trace.size() == 4001);
}

TEST_CASE("the loss trace never increases at the guaranteed step size") {
  Rng rng(17);
  for (int round = 0; round < 10; ++round) {
    const int b = int(rng.integer(2, 16));
    const int p = int(rng.integer(1, 6));
    const int d = int(rng.integer(1, 6));
    const auto student = random_batch(rng, b, p);
    const auto teacher = random_batch(rng, b, d);
    const double lr = descent_learning_rate_bound(student);
    CHECK(lr > 0);
    const auto fit = fit_projection_gd(teacher, student, lr, 50, 7);
    for (std::size_t i = 1; i < fit.loss_trace.size(); ++i)
      CHECK(fit.loss_trace[i] <= fit.loss_trace[i - 1] + 1e-12);
  }
}

TEST_CASE("a huge step size is reported as divergence") {
  Rng rng(18);
  const auto student = random_batch(rng, 8, 4, 10.0);
  const auto teacher = random_batch(rng, 8, 4, 10.0);
  try {
    fit_projection_gd(teacher, student, 1e6, 500, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::divergence);
  }
}

TEST_CASE("descent converges to the closed-form optimum") {
  Rng rng(19);
  for (int round = 0; round < 5; ++round) {
    // well-conditioned: more samples than dimensions, moderate scale
    const auto student = random_batch(rng, 40, 3);
    const auto teacher = random_batch(rng, 40, 4);
    const auto best = fit_projection_closed_form(teacher, student);
    const double target = distill_loss(teacher, student, best);
    const double lr = descent_learning_rate_bound(student);
    const auto fit = fit_projection_gd(teacher, student, lr, 20000, 5);
    CHECK(std::abs(fit.loss_trace.back() - target) < 1e-6);
  }
}

TEST_CASE("the closed form recovers an exact affine relation") {
  Rng rng(20);
  const auto student = random_batch(rng, 30, 4);
  const auto truth = random_projection(rng, 6, 4);
  FeatureBatch teacher = student * truth.weight.transpose();
  teacher.rowwise() += truth.bias.transpose();
  const auto best = fit_projection_closed_form(teacher, student);
  CHECK(distill_loss(teacher, student, best) < 1e-10);
  CHECK((best.weight - truth.weight).norm() < 1e-5);
  CHECK((best.bias - truth.bias).norm() < 1e-5);
}

TEST_CASE("the closed form beats or ties random projections") {
  Rng rng(21);
  const auto student = random_batch(rng, 12, 3);
  const auto teacher = random_batch(rng, 12, 5);
  const auto best = fit_projection_closed_form(teacher, student);
  const double opt = distill_loss(teacher, student, best);
  for (int i = 0; i < 100; ++i) {
    const auto candidate = random_projection(rng, 5, 3, 2.0);
    CHECK(opt <= distill_loss(teacher, student, candidate) + 1e-9);
  }
  // a single sample is always fit exactly
  const auto s1 = random_batch(rng, 1, 3);
  const auto t1 = random_batch(rng, 1, 5);
  const auto fit1 = fit_projection_closed_form(t1, s1);
  CHECK(distill_loss(t1, s1, fit1) < 1e-10);
}

TEST_CASE("bias-free fitting keeps the bias at zero") {
  Rng rng(22);
  const auto student = random_batch(rng, 20, 4);
  const auto truth = random_projection(rng, 5, 4);
  FeatureBatch teacher = student * truth.weight.transpose();  // no offset
  const auto closed = fit_projection_closed_form(teacher, student, false);
  CHECK(closed.bias.norm() == 0.0);
  CHECK(distill_loss(teacher, student, closed) < 1e-10);
  const double lr = descent_learning_rate_bound(student, false);
  const auto fit = fit_projection_gd(teacher, student, lr, 3000, 3, false);
  CHECK(fit.projection.bias.norm() == 0.0);
  CHECK(fit.loss_trace.back() < 1e-8);
}

TEST_CASE("feature CSVs round-trip") {
  Rng rng(23);
  const auto batch = random_batch(rng, 7, 5, 3.0);
  const auto path = std::string(SCRATCH_DIR) + "/features_roundtrip.csv";
  save_features(batch, path);
  const auto loaded = load_features(path);
  REQUIRE(loaded.rows() == batch.rows());
  REQUIRE(loaded.cols() == batch.cols());
  CHECK((loaded - batch).norm() == 0.0);
}

TEST_CASE("feature CSV parsing rejects bad input with the right codes") {
  // -1 means "parsed fine"
  const auto code_of = [](const std::string& text) -> int {
    try {
      parse_features_csv(text, "test");
      return -1;
    } catch (const Error& e) {
      return static_cast<int>(e.code());
    }
  };
  const auto as_int = [](ErrorCode c) { return static_cast<int>(c); };
  CHECK(code_of("1,2\n3,4\n") == -1);
  CHECK(code_of("1,2\n3\n") == as_int(ErrorCode::parse_error));   // ragged row
  CHECK(code_of("1,two\n") == as_int(ErrorCode::parse_error));    // not a number
  CHECK(code_of("") == as_int(ErrorCode::parse_error));           // empty
  CHECK(code_of("1,inf\n") == as_int(ErrorCode::range_error));    // non-finite
  CHECK(code_of("1,nan\n") == as_int(ErrorCode::range_error));
  CHECK(code_of("1, 2\r\n3, 4\r\n") == -1);                       // CRLF and spaces
  try {
    load_features("/nonexistent/path/features.csv");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_error);
  }
}

TEST_CASE("the loss trace CSV has one row per entry") {
  const std::vector<double> trace{1.5, 0.75, 0.5};
  const auto csv = loss_trace_csv(trace);
  CHECK(csv.rfind("epoch,loss\n", 0) == 0);
  CHECK(csv.find("0,1.5") != std::string::npos);
  CHECK(csv.find("2,0.5") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("the bundled distillation fixture is learnable") {
  const auto teacher = load_features(std::string(FIXTURES_DIR) + "/distill_teacher.csv");
  const auto student = load_features(std::string(FIXTURES_DIR) + "/distill_student.csv");
  REQUIRE(teacher.rows() == student.rows());
  const auto best = fit_projection_closed_form(teacher, student);
  // the fixture is an affine map plus 0.01-scale noise
  CHECK(distill_loss(teacher, student, best) < 1e-2);
}
