#include "distill.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include "annotation_io.hpp"
#include "errors.hpp"

namespace doclab {

namespace {

void check_batch_pair(const FeatureBatch& teacher, const FeatureBatch& student) {
  if (teacher.rows() < 1 || student.rows() < 1)
    raise(ErrorCode::invalid_argument, "feature batch is empty");
  if (teacher.rows() != student.rows())
    raise(ErrorCode::shape_mismatch,
          "teacher has " + std::to_string(teacher.rows()) + " rows, student " +
              std::to_string(student.rows()));
}

void check_projection(const FeatureBatch& teacher, const FeatureBatch& student,
                      const LinearProjection& proj) {
  if (proj.weight.rows() != teacher.cols() || proj.weight.cols() != student.cols() ||
      proj.bias.size() != teacher.cols())
    raise(ErrorCode::shape_mismatch,
          "projection " + std::to_string(proj.weight.rows()) + "x" +
              std::to_string(proj.weight.cols()) + " with bias " +
              std::to_string(proj.bias.size()) + " does not map " +
              std::to_string(student.cols()) + " -> " + std::to_string(teacher.cols()));
}

// Projected-minus-teacher residuals, one row per sample.
Eigen::MatrixXd residuals(const FeatureBatch& teacher, const FeatureBatch& student,
                          const LinearProjection& proj) {
  Eigen::MatrixXd projected = student * proj.weight.transpose();
  projected.rowwise() += proj.bias.transpose();
  return projected - teacher;
}

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace

double distill_loss(const FeatureBatch& teacher, const FeatureBatch& student,
                    const LinearProjection& proj) {
  check_batch_pair(teacher, student);
  check_projection(teacher, student, proj);
  const Eigen::MatrixXd r = residuals(teacher, student, proj);
  return r.squaredNorm() / static_cast<double>(teacher.rows());
}

ProjectionGradient distill_grad(const FeatureBatch& teacher, const FeatureBatch& student,
                                const LinearProjection& proj) {
  check_batch_pair(teacher, student);
  check_projection(teacher, student, proj);
  const double scale = 2.0 / static_cast<double>(teacher.rows());
  const Eigen::MatrixXd r = residuals(teacher, student, proj);
  ProjectionGradient grad;
  grad.weight = scale * (r.transpose() * student);
  grad.bias = scale * r.colwise().sum().transpose();
  return grad;
}

double descent_learning_rate_bound(const FeatureBatch& student, bool with_bias) {
  if (student.rows() < 1) raise(ErrorCode::invalid_argument, "feature batch is empty");
  const Eigen::Index b = student.rows();
  const Eigen::Index p = student.cols();
  Eigen::MatrixXd augmented(b, with_bias ? p + 1 : p);
  augmented.leftCols(p) = student;
  if (with_bias) augmented.col(p).setOnes();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(augmented.transpose() * augmented);
  const double lipschitz =
      2.0 / static_cast<double>(b) * solver.eigenvalues().maxCoeff();
  if (lipschitz <= 0.0) return 1.0;
  return 1.0 / lipschitz;
}

GdResult fit_projection_gd(const FeatureBatch& teacher, const FeatureBatch& student, double lr,
                           int epochs, std::uint64_t seed, bool with_bias) {
  check_batch_pair(teacher, student);
  if (lr <= 0.0) raise(ErrorCode::invalid_argument, "learning rate must be positive");
  if (epochs < 1) raise(ErrorCode::invalid_argument, "epochs must be at least 1");

  const Eigen::Index d = teacher.cols();
  const Eigen::Index p = student.cols();
  GdResult result;
  result.projection.weight.resize(d, p);
  result.projection.bias = Eigen::VectorXd::Zero(d);
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      result.projection.weight(i, j) = (2.0 * unit_double(rng) - 1.0) * 0.01;
  if (with_bias)
    for (Eigen::Index i = 0; i < d; ++i)
      result.projection.bias(i) = (2.0 * unit_double(rng) - 1.0) * 0.01;

  result.loss_trace.reserve(static_cast<size_t>(epochs) + 1);
  double loss = distill_loss(teacher, student, result.projection);
  if (!std::isfinite(loss)) raise(ErrorCode::divergence, "initial loss is not finite");
  result.loss_trace.push_back(loss);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const ProjectionGradient grad = distill_grad(teacher, student, result.projection);
    result.projection.weight -= lr * grad.weight;
    if (with_bias) result.projection.bias -= lr * grad.bias;
    loss = distill_loss(teacher, student, result.projection);
    if (!std::isfinite(loss))
      raise(ErrorCode::divergence,
            "loss diverged at epoch " + std::to_string(epoch + 1) + " with lr " +
                std::to_string(lr));
    result.loss_trace.push_back(loss);
  }
  return result;
}

LinearProjection fit_projection_closed_form(const FeatureBatch& teacher,
                                            const FeatureBatch& student, bool with_bias) {
  check_batch_pair(teacher, student);
  constexpr double kRidge = 1e-9;
  const Eigen::Index b = student.rows();
  const Eigen::Index p = student.cols();
  const Eigen::Index cols = with_bias ? p + 1 : p;
  Eigen::MatrixXd augmented(b, cols);
  augmented.leftCols(p) = student;
  if (with_bias) augmented.col(p).setOnes();
  Eigen::MatrixXd gram = augmented.transpose() * augmented;
  gram.diagonal().array() += kRidge;
  const Eigen::MatrixXd solution = gram.ldlt().solve(augmented.transpose() * teacher);
  LinearProjection proj;
  proj.weight = solution.topRows(p).transpose();
  proj.bias = with_bias ? Eigen::VectorXd(solution.row(p).transpose())
                        : Eigen::VectorXd(Eigen::VectorXd::Zero(teacher.cols()));
  return proj;
}

FeatureBatch parse_features_csv(const std::string& text, const std::string& where) {
  std::vector<std::vector<double>> rows;
  size_t line_start = 0;
  size_t line_no = 0;
  while (line_start < text.size()) {
    size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    std::string_view line(text.data() + line_start, line_end - line_start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line_start = line_end + 1;
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    size_t field_start = 0;
    while (true) {
      size_t comma = line.find(',', field_start);
      std::string_view field = line.substr(
          field_start, comma == std::string_view::npos ? std::string_view::npos
                                                       : comma - field_start);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
        field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t'))
        field.remove_suffix(1);
      double value = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size())
        raise(ErrorCode::parse_error, where + " line " + std::to_string(line_no) +
                                          ": bad number \"" + std::string(field) + "\"");
      if (!std::isfinite(value))
        raise(ErrorCode::range_error,
              where + " line " + std::to_string(line_no) + ": non-finite entry");
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      field_start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      raise(ErrorCode::parse_error, where + " line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(rows.front().size()) + " columns, got " +
                                        std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) raise(ErrorCode::parse_error, where + ": no feature rows");
  FeatureBatch batch(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.front().size(); ++j)
      batch(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return batch;
}

FeatureBatch load_features(const std::string& path) {
  return parse_features_csv(read_text_file(path), path);
}

std::string features_to_csv(const FeatureBatch& batch) {
  std::string out;
  char buf[40];
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    for (Eigen::Index j = 0; j < batch.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", batch(i, j));
      if (j) out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void save_features(const FeatureBatch& batch, const std::string& path) {
  write_text_file(path, features_to_csv(batch));
}

std::string loss_trace_csv(const std::vector<double>& trace) {
  std::string out = "epoch,loss\n";
  char buf[48];
  for (size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, trace[i]);
    out += buf;
  }
  return out;
}

}  // namespace doclab
