#pragma once

#include "gmr/datagen.hpp"
#include "gmr/net.hpp"
#include "gmr/objective.hpp"

namespace gmr {

struct TrainConfig {
    double lr = 5e-5;
    int batch = 8;
    int steps = 1000;
    std::uint64_t seed = 0;
    LossWeights weights;
    OrientationLossKind ori_kind = OrientationLossKind::Chordal;
    bool flip_aug = false;
    int eval_every = 0;  // 0: no periodic evaluation

    void validate() const;
};

/// Adam moments, one pair per parameter tensor, matching GmrParams order.
struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::int64_t step = 0;
    std::vector<Eigen::MatrixXd> m, v;

    static AdamState init(const GmrParams& params);
};

struct LossBreakdown {
    double total = 0, ori = 0, trans = 0, vertex = 0, smooth = 0;
};

/// One Adam update on the summed batch loss. Deterministic; throws
/// NumericFailure on a non-finite loss.
LossBreakdown train_step(GmrParams& params, AdamState& adam,
                         const std::vector<const MotionSample*>& batch,
                         const TrainConfig& config, const BodySkeleton& skel);

/// Runs gmr_infer per sample (first T frames), wraps outputs, averages
/// OME/TME/VME per sequence and reports the unweighted mean over sequences.
MetricReport evaluate(const GmrParams& params, const std::vector<MotionSample>& dataset,
                      const BodySkeleton& skel);

/// Metrics of an arbitrary fixed prediction rule, e.g. the zero-motion
/// predictor; pred(sample) must return gt_motions.size() motions.
template <typename Pred>
MetricReport evaluate_rule(const std::vector<MotionSample>& dataset, const BodySkeleton& skel,
                           Pred&& pred) {
    if (dataset.empty()) throw InvalidInput("empty dataset");
    MetricReport mean;
    for (const auto& s : dataset) {
        std::vector<GlobalMotion> p = pred(s);
        mean.ome_deg += metric_ome(p, s.gt_motions);
        mean.tme_mm += metric_tme(p, s.gt_motions);
        mean.vme_mm += metric_vme(skel, s.local, s.beta, p, s.gt_motions);
    }
    const double n = static_cast<double>(dataset.size());
    mean.ome_deg /= n;
    mean.tme_mm /= n;
    mean.vme_mm /= n;
    return mean;
}

struct TrainResult {
    GmrParams params;
    std::string log_csv;  // step,L_total,L_ori,L_trans,L_vertex,L_smooth,ome,tme,vme
};

/// Seeded mini-batch training loop over the dataset. With flip_aug, each
/// drawn sample is temporally reversed with probability 1/2. Each step's
/// batch is drawn from (seed, params.step), so continuing from a checkpoint
/// with its optimizer state replays the exact uninterrupted run. Pass adam
/// to carry optimizer state across calls; by default a fresh state is used.
TrainResult train(GmrParams params, const TrainConfig& config,
                  const std::vector<MotionSample>& train_set,
                  const std::vector<MotionSample>& eval_set, const BodySkeleton& skel,
                  AdamState* adam = nullptr);

}  // namespace gmr
