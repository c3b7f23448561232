#pragma once

// Slow, obviously-correct re-derivations of everything the library computes.
// They share no code with src/; tests compare the two sides.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"

namespace oracle {

double iou(const doclab::BoundingBox& a, const doclab::BoundingBox& b);

enum class Flag { fp, tp, ignored };

struct MatchOutcome {
  std::vector<size_t> order;  // class detections ranked by score, indices into the input
  std::vector<Flag> flags;    // aligned with order
  long npos = 0;              // non-ignored ground truth of the class
};

MatchOutcome match_class(std::span<const doclab::Detection> dets,
                         std::span<const doclab::GroundTruthInstance> gts,
                         doclab::LayoutCategory cls, double iou_threshold);

struct Counts {
  long tp = 0, fp = 0, fn = 0;
};

Counts counts_at(std::span<const doclab::Detection> dets,
                 std::span<const doclab::GroundTruthInstance> gts, doclab::LayoutCategory cls,
                 double score_threshold, double iou_threshold);

double f1_at(std::span<const doclab::Detection> dets,
             std::span<const doclab::GroundTruthInstance> gts, doclab::LayoutCategory cls,
             double score_threshold, double iou_threshold);

// Max F1 over the dense grid k/grid_steps, k = 0..grid_steps.
double grid_max_f1(std::span<const doclab::Detection> dets,
                   std::span<const doclab::GroundTruthInstance> gts, doclab::LayoutCategory cls,
                   double iou_threshold, long grid_steps = 10000);

// Empty when the class has no non-ignored ground truth.
std::optional<double> class_ap(std::span<const doclab::Detection> dets,
                               std::span<const doclab::GroundTruthInstance> gts,
                               doclab::LayoutCategory cls, double iou_threshold, bool allpoint);

double dataset_map50(std::span<const doclab::Detection> dets, const doclab::DatasetSplit& split,
                     double iou_threshold, bool allpoint);

// Size of a maximum detection-to-ground-truth matching (non-ignored ground
// truth only, edges where IoU clears the threshold). Upper bound for greedy TP.
int max_bipartite(std::span<const doclab::Detection> dets,
                  std::span<const doclab::GroundTruthInstance> gts, doclab::LayoutCategory cls,
                  double iou_threshold);

double distill_loss_naive(const Eigen::MatrixXd& teacher, const Eigen::MatrixXd& student,
                          const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias);

void finite_difference_grad(const Eigen::MatrixXd& teacher, const Eigen::MatrixXd& student,
                            const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias, double h,
                            Eigen::MatrixXd& weight_grad_out, Eigen::VectorXd& bias_grad_out);

}  // namespace oracle
