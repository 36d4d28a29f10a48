#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfd/config.hpp"
#include "mfd/eval.hpp"
#include "mfd/model.hpp"

namespace mfd {

struct PreparedDoc {
  std::string id;
  DocInputs inputs;
  std::vector<InvolvementScores> labels;  // empty when unlabeled
};

struct TrainOptions {
  std::size_t max_steps = 0;  // 0: run all epochs
  bool freeze_head = true;    // stage two keeps the contrastive head fixed
};

struct EpochRecord {
  std::size_t epoch = 0;
  double lr = 0;
  double loss = 0, pred_loss = 0, llm_loss = 0;  // batch means
  std::optional<MetricReport> val;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  std::optional<double> best_val_mae;
  std::size_t steps = 0;

  nlohmann::json to_json() const;
  // epoch,lr,loss,pred_loss,llm_loss,val_mae,val_accuracy
  std::string history_csv() const;
};

// AdamW + StepLR over (document, sentence) samples shuffled per epoch under
// config.seed; each batch is grouped by document so the analysis stack runs
// once per document. With a validation set the parameters of the best epoch
// by mean MAE are restored at the end.
TrainResult train_predictor(FusionModel& model, const std::vector<PreparedDoc>& train,
                            const std::vector<PreparedDoc>& val, const TrainConfig& config,
                            const TrainOptions& options = {});

std::vector<InvolvementScores> predict_all(const FusionModel& model, const std::vector<PreparedDoc>& docs);
std::vector<InvolvementScores> labels_of(const std::vector<PreparedDoc>& docs);

}  // namespace mfd
