#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace doclab {

// One feature vector per row: B x D for the teacher, B x P for the student.
using FeatureBatch = Eigen::MatrixXd;

// Affine map from student space (P) into teacher space (D).
struct LinearProjection {
  Eigen::MatrixXd weight;  // D x P
  Eigen::VectorXd bias;    // D
};

// Mean over the batch of the squared Euclidean distance between each teacher
// row and the projected student row. Throws ShapeMismatch on inconsistent
// shapes, InvalidArgument on an empty batch.
double distill_loss(const FeatureBatch& teacher, const FeatureBatch& student,
                    const LinearProjection& proj);

struct ProjectionGradient {
  Eigen::MatrixXd weight;  // D x P
  Eigen::VectorXd bias;    // D
};

ProjectionGradient distill_grad(const FeatureBatch& teacher, const FeatureBatch& student,
                                const LinearProjection& proj);

// Largest step size with guaranteed descent for this objective: the loss
// gradient is Lipschitz with constant (2/B) * lambda_max of the (optionally
// bias-augmented) student Gram matrix, and 1/L steps never increase the loss.
double descent_learning_rate_bound(const FeatureBatch& student, bool with_bias = true);

struct GdResult {
  LinearProjection projection;
  std::vector<double> loss_trace;  // initial loss plus one entry per epoch
};

// Full-batch gradient descent from a seeded uniform [-0.01, 0.01] start.
// Requires lr > 0 and epochs >= 1; throws Divergence when the loss leaves the
// finite range. With with_bias false the bias stays zero.
GdResult fit_projection_gd(const FeatureBatch& teacher, const FeatureBatch& student, double lr,
                           int epochs, std::uint64_t seed, bool with_bias = true);

// Normal-equations minimizer on bias-augmented student features, with a tiny
// ridge term so rank-deficient instances stay solvable.
LinearProjection fit_projection_closed_form(const FeatureBatch& teacher,
                                            const FeatureBatch& student, bool with_bias = true);

// Plain CSV, one sample per row, no header.
FeatureBatch parse_features_csv(const std::string& text, const std::string& where);
FeatureBatch load_features(const std::string& path);
std::string features_to_csv(const FeatureBatch& batch);
void save_features(const FeatureBatch& batch, const std::string& path);

// epoch,loss rows for plotting.
std::string loss_trace_csv(const std::vector<double>& trace);

}  // namespace doclab
